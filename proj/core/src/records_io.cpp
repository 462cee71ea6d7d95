#include "sivsim/records_io.hpp"

#include <charconv>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "sivsim/errors.hpp"

namespace sivsim {

namespace {

constexpr const char* kHeader = "# columns: trajectory_id,time_ns,channel";

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

[[noreturn]] void bad_line(std::size_t line, const std::string& why) {
  throw ParameterError("records line " + std::to_string(line) + ": " + why);
}

template <class T>
T parse_number(std::string_view s, std::size_t line, const char* what) {
  T v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) bad_line(line, std::string("invalid ") + what);
  return v;
}

}  // namespace

RecordWriter::RecordWriter(std::ostream& out, std::span<const std::string> comments) : out_(out) {
  out_ << kHeader << '\n';
  for (const auto& c : comments) out_ << "# " << c << '\n';
}

void RecordWriter::write(const DetectionRecord& record) {
  if (finished_) throw Error("record writer already finished");
  for (const auto& c : record.clicks)
    out_ << record.trajectory_id << ',' << format_double(c.time_ns) << ',' << record.label(c) << '\n';
  ++count_;
}

void RecordWriter::finish(double duration_ns, std::uint64_t seed) {
  if (finished_) return;
  out_ << "# end duration_ns=" << format_double(duration_ns) << " seed=" << seed << " trajectories=" << count_
       << '\n';
  finished_ = true;
}

void write_records(std::ostream& out, std::span<const DetectionRecord> records) {
  RecordWriter w(out);
  for (const auto& r : records) w.write(r);
  w.finish(records.empty() ? 0.0 : records.front().duration_ns, records.empty() ? 0 : records.front().seed);
}

RecordSet read_records(std::istream& in) {
  struct Row {
    std::int64_t id;
    double t;
    int channel;
  };
  std::vector<Row> rows;
  auto labels = std::make_shared<std::vector<std::string>>();
  std::map<std::string, int, std::less<>> index;
  RecordSet set;
  bool header = false, footer = false;
  std::int64_t n_traj = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (footer) bad_line(lineno, "content after footer");
    if (line[0] == '#') {
      if (line == kHeader) {
        header = true;
      } else if (line.rfind("# end ", 0) == 0) {
        std::istringstream fs(line.substr(6));
        std::string kv;
        bool have_d = false, have_s = false, have_n = false;
        while (fs >> kv) {
          const auto eq = kv.find('=');
          if (eq == std::string::npos) bad_line(lineno, "malformed footer field '" + kv + "'");
          const std::string key = kv.substr(0, eq);
          const std::string_view val = std::string_view(kv).substr(eq + 1);
          if (key == "duration_ns") {
            set.duration_ns = parse_number<double>(val, lineno, "duration");
            have_d = true;
          } else if (key == "seed") {
            set.seed = parse_number<std::uint64_t>(val, lineno, "seed");
            have_s = true;
          } else if (key == "trajectories") {
            n_traj = parse_number<std::int64_t>(val, lineno, "trajectory count");
            have_n = true;
          }
        }
        if (!have_d || !have_s || !have_n) bad_line(lineno, "footer needs duration_ns, seed and trajectories");
        footer = true;
      }
      continue;
    }
    if (!header) bad_line(lineno, "data before the column header");
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string::npos) bad_line(lineno, "expected trajectory_id,time_ns,channel");
    const std::string_view sv(line);
    Row r{parse_number<std::int64_t>(sv.substr(0, c1), lineno, "trajectory id"),
          parse_number<double>(sv.substr(c1 + 1, c2 - c1 - 1), lineno, "time"), 0};
    const std::string name(sv.substr(c2 + 1));
    if (name.empty()) bad_line(lineno, "empty channel");
    auto it = index.find(name);
    if (it == index.end()) {
      it = index.emplace(name, static_cast<int>(labels->size())).first;
      labels->push_back(name);
    }
    r.channel = it->second;
    rows.push_back(r);
  }
  if (!footer) throw ParameterError("records: missing footer line '# end ...'");

  set.records.resize(static_cast<std::size_t>(n_traj));
  for (std::int64_t i = 0; i < n_traj; ++i) {
    auto& rec = set.records[static_cast<std::size_t>(i)];
    rec.trajectory_id = i;
    rec.duration_ns = set.duration_ns;
    rec.seed = set.seed;
    rec.labels = labels;
  }
  for (const auto& r : rows) {
    if (r.id < 0 || r.id >= n_traj) throw ParameterError("records: trajectory id out of range");
    if (r.t < 0.0 || r.t > set.duration_ns) throw ParameterError("records: click time outside [0, duration]");
    auto& clicks = set.records[static_cast<std::size_t>(r.id)].clicks;
    if (!clicks.empty() && !(r.t > clicks.back().time_ns))
      throw ParameterError("records: click times not strictly increasing in trajectory " + std::to_string(r.id));
    clicks.push_back({r.t, r.channel});
  }
  return set;
}

}  // namespace sivsim
