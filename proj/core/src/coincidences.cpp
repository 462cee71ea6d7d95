#include <algorithm>
#include <cmath>
#include <string>

#include "parallel.hpp"
#include "sivsim/analysis.hpp"
#include "sivsim/errors.hpp"
#include "sivsim/rng.hpp"

namespace sivsim {

namespace {

// Integral of max(0, D - |x|) from 0 to x (odd in x).
double overlap_integral(double x, double d) {
  const double ax = std::min(std::abs(x), d);
  const double v = d * ax - 0.5 * ax * ax;
  return x < 0 ? -v : v;
}

std::vector<double> channel_times(const DetectionRecord& r, int channel) {
  std::vector<double> out;
  for (const auto& c : r.clicks)
    if (c.channel == channel) out.push_back(c.time_ns);
  return out;
}

constexpr std::uint64_t kBackgroundStream = 0x9E3779B97F4A7C15ULL;

}  // namespace

void CoincidenceConfig::validate() const {
  if (!(bin_width_ns > 0.0)) throw ParameterError("bin_width must be > 0");
  if (!(max_tau_ns >= 10.0 * bin_width_ns)) throw ParameterError("max_tau must be >= 10 * bin_width");
  if (!(norm_lo_ns >= 0.5 * max_tau_ns - 1e-12) || !(norm_hi_ns <= max_tau_ns + 1e-12) || !(norm_lo_ns < norm_hi_ns))
    throw ParameterError("normalization window must lie inside [0.5 * max_tau, max_tau]");
  if (channel_a.empty() || channel_b.empty()) throw ParameterError("coincidence channels must be named");
}

CoincidenceConfig& CoincidenceConfig::with_default_window() {
  norm_lo_ns = 0.5 * max_tau_ns;
  norm_hi_ns = max_tau_ns;
  return *this;
}

CoincidenceHistogram::CoincidenceHistogram(CoincidenceConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  half_bins_ = static_cast<int>(std::llround(cfg_.max_tau_ns / cfg_.bin_width_ns));
  counts_.assign(static_cast<std::size_t>(2 * half_bins_ + 1), 0);
  exposure_.assign(counts_.size(), 0.0);
}

std::vector<double> CoincidenceHistogram::centers() const {
  std::vector<double> out(counts_.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = (static_cast<int>(i) - half_bins_) * cfg_.bin_width_ns;
  return out;
}

void CoincidenceHistogram::add(const DetectionRecord& record) {
  ++records_;
  const double w = cfg_.bin_width_ns;
  const double d = record.duration_ns;
  for (std::size_t i = 0; i < exposure_.size(); ++i) {
    const double c = (static_cast<int>(i) - half_bins_) * w;
    exposure_[i] += (overlap_integral(c + 0.5 * w, d) - overlap_integral(c - 0.5 * w, d)) / w;
  }

  const int a = record.channel_id(cfg_.channel_a);
  const int b = record.channel_id(cfg_.channel_b);
  if (a < 0 || b < 0) return;
  channels_seen_ = true;
  const auto ta = channel_times(record, a);
  const auto tb = a == b ? ta : channel_times(record, b);
  const double edge = (half_bins_ + 0.5) * w;
  std::size_t start = 0;
  for (std::size_t i = 0; i < ta.size(); ++i) {
    while (start < tb.size() && tb[start] < ta[i] - edge) ++start;
    for (std::size_t j = start; j < tb.size() && tb[j] < ta[i] + edge; ++j) {
      if (a == b && i == j) continue;
      const auto k = static_cast<long>(std::floor((tb[j] - ta[i]) / w + 0.5)) + half_bins_;
      if (k >= 0 && k < static_cast<long>(counts_.size())) ++counts_[static_cast<std::size_t>(k)];
    }
  }
}

void CoincidenceHistogram::merge(const CoincidenceHistogram& other) {
  if (other.counts_.size() != counts_.size() || other.cfg_.bin_width_ns != cfg_.bin_width_ns)
    throw DimensionError("cannot merge histograms with different binning");
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    counts_[i] += other.counts_[i];
    exposure_[i] += other.exposure_[i];
  }
  records_ += other.records_;
  channels_seen_ = channels_seen_ || other.channels_seen_;
}

CorrelationResult CoincidenceHistogram::result() const {
  if (records_ == 0) throw ParameterError("no records");
  if (!channels_seen_)
    throw ParameterError("channels '" + cfg_.channel_a + "' / '" + cfg_.channel_b + "' not present in records");
  const auto tau = centers();
  double plateau = 0.0;
  std::int64_t window_counts = 0;
  int window_bins = 0;
  for (std::size_t i = 0; i < tau.size(); ++i) {
    const double at = std::abs(tau[i]);
    if (at < cfg_.norm_lo_ns - 1e-9 || at > cfg_.norm_hi_ns + 1e-9 || !(exposure_[i] > 0.0)) continue;
    plateau += static_cast<double>(counts_[i]) / exposure_[i];
    window_counts += counts_[i];
    ++window_bins;
  }
  if (window_counts == 0) throw InsufficientStatisticsError();
  plateau /= window_bins;

  CorrelationResult out;
  out.normalization = plateau;
  for (std::size_t i = 0; i < tau.size(); ++i) {
    out.tau.push_back(tau[i]);
    if (!(exposure_[i] > 0.0)) {
      out.g2.push_back(0.0);
      out.std_error.push_back(0.0);
      continue;
    }
    const double scale = 1.0 / (exposure_[i] * plateau);
    const double n = static_cast<double>(counts_[i]);
    out.g2.push_back(n * scale);
    out.std_error.push_back(std::sqrt(std::max(n, 1.0)) * scale);
  }
  return out;
}

CorrelationResult g2_from_records(std::span<const DetectionRecord> records, const CoincidenceConfig& cfg,
                                  int workers) {
  if (records.empty()) throw ParameterError("no records");
  // Chunk boundaries do not depend on the worker count, so the in-order
  // merge of floating exposures is reproducible for any number of workers.
  constexpr std::size_t kChunk = 1024;
  const std::size_t chunks = (records.size() + kChunk - 1) / kChunk;
  std::vector<CoincidenceHistogram> parts(chunks, CoincidenceHistogram(cfg));
  detail::parallel_for(workers, static_cast<int>(chunks), [&](int c) {
    const std::size_t lo = static_cast<std::size_t>(c) * kChunk;
    const std::size_t hi = std::min(records.size(), lo + kChunk);
    for (std::size_t i = lo; i < hi; ++i) parts[static_cast<std::size_t>(c)].add(records[i]);
  });
  for (std::size_t c = 1; c < parts.size(); ++c) parts[0].merge(parts[c]);
  return parts[0].result();
}

CorrelationResult bin_model_curve(const CorrelationResult& fine, const CoincidenceConfig& cfg, double duration_ns) {
  cfg.validate();
  if (fine.tau.size() < 2) throw ParameterError("model curve needs at least two points");
  auto interp = [&](double t) {
    const auto it = std::upper_bound(fine.tau.begin(), fine.tau.end(), t);
    if (it == fine.tau.begin()) return fine.g2.front();
    if (it == fine.tau.end()) return fine.g2.back();
    const auto k = static_cast<std::size_t>(it - fine.tau.begin());
    const double f = (t - fine.tau[k - 1]) / (fine.tau[k] - fine.tau[k - 1]);
    return (1.0 - f) * fine.g2[k - 1] + f * fine.g2[k];
  };
  const CoincidenceHistogram shape(cfg);
  const auto tau = shape.centers();
  const double w = cfg.bin_width_ns;
  constexpr int kSub = 16;
  CorrelationResult out;
  double plateau = 0.0;
  int window_bins = 0;
  for (double c : tau) {
    double num = 0.0, den = 0.0;
    for (int s = 0; s < kSub; ++s) {
      const double t = c - 0.5 * w + (s + 0.5) * w / kSub;
      const double weight = std::max(0.0, duration_ns - std::abs(t));
      num += weight * interp(t);
      den += weight;
    }
    const double v = den > 0.0 ? num / den : 0.0;
    out.tau.push_back(c);
    out.g2.push_back(v);
    out.std_error.push_back(0.0);
    if (std::abs(c) >= cfg.norm_lo_ns - 1e-9 && std::abs(c) <= cfg.norm_hi_ns + 1e-9) {
      plateau += v;
      ++window_bins;
    }
  }
  plateau /= window_bins;
  for (auto& v : out.g2) v /= plateau;
  out.normalization = plateau;
  return out;
}

std::vector<DetectionRecord> poisson_records(const std::map<std::string, double>& rates, double duration_ns,
                                             int n_records, std::uint64_t seed) {
  if (!(duration_ns > 0.0) || n_records < 1) throw ParameterError("poisson_records: bad duration or count");
  auto labels = std::make_shared<std::vector<std::string>>();
  for (const auto& [name, rate] : rates) {
    if (!(rate >= 0.0)) throw ParameterError("poisson rate must be >= 0");
    labels->push_back(name);
  }
  std::vector<DetectionRecord> out;
  for (int id = 0; id < n_records; ++id) {
    RandomStream rng(seed, static_cast<std::uint64_t>(id));
    DetectionRecord r;
    r.duration_ns = duration_ns;
    r.trajectory_id = id;
    r.seed = seed;
    r.labels = labels;
    int ch = 0;
    for (const auto& [name, rate] : rates) {
      if (rate > 0.0)
        for (double t = rng.exponential() / rate; t <= duration_ns; t += rng.exponential() / rate)
          r.clicks.push_back({t, ch});
      ++ch;
    }
    std::stable_sort(r.clicks.begin(), r.clicks.end(),
                     [](const Click& x, const Click& y) { return x.time_ns < y.time_ns; });
    out.push_back(std::move(r));
  }
  return out;
}

void add_background(std::vector<DetectionRecord>& records, const std::map<std::string, double>& rates,
                    std::uint64_t seed) {
  for (auto& r : records) {
    auto labels = r.labels ? std::make_shared<std::vector<std::string>>(*r.labels)
                           : std::make_shared<std::vector<std::string>>();
    RandomStream rng(seed ^ kBackgroundStream, static_cast<std::uint64_t>(r.trajectory_id));
    for (const auto& [name, rate] : rates) {
      if (!(rate >= 0.0)) throw ParameterError("background rate must be >= 0");
      auto it = std::find(labels->begin(), labels->end(), name);
      if (it == labels->end()) {
        labels->push_back(name);
        it = labels->end() - 1;
      }
      const int ch = static_cast<int>(it - labels->begin());
      if (rate > 0.0)
        for (double t = rng.exponential() / rate; t <= r.duration_ns; t += rng.exponential() / rate)
          r.clicks.push_back({t, ch});
    }
    std::stable_sort(r.clicks.begin(), r.clicks.end(),
                     [](const Click& x, const Click& y) { return x.time_ns < y.time_ns; });
    r.labels = std::move(labels);
  }
}

}  // namespace sivsim
