#pragma once

// Text serialization of detection records:
//
//   # columns: trajectory_id,time_ns,channel
//   0,12.3456,T
//   ...
//   # end duration_ns=100 seed=7 trajectories=1000
//
// Trajectories without clicks produce no lines; the footer restores them.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sivsim/trajectories.hpp"

namespace sivsim {

class RecordWriter {
 public:
  /// Writes the header immediately; extra lines are emitted as '#' comments.
  explicit RecordWriter(std::ostream& out, std::span<const std::string> comments = {});

  void write(const DetectionRecord& record);
  /// Writes the footer; no further records may follow.
  void finish(double duration_ns, std::uint64_t seed);

  std::int64_t trajectories() const noexcept { return count_; }

 private:
  std::ostream& out_;
  std::int64_t count_ = 0;
  bool finished_ = false;
};

void write_records(std::ostream& out, std::span<const DetectionRecord> records);

struct RecordSet {
  std::vector<DetectionRecord> records;
  double duration_ns = 0.0;
  std::uint64_t seed = 0;
};

/// Throws ParameterError naming the line number on malformed input.
RecordSet read_records(std::istream& in);

}  // namespace sivsim
