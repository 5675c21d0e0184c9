#pragma once

#include <cstdint>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace bats {

/// FNV-1a 64-bit content digest, used for step payloads in the event log.
std::uint64_t fnv1a64(std::string_view data);
std::string digest_hex(std::string_view data);

/// Append-only JSONL event stream. The default clock is logical (a counter),
/// so mock runs replay to byte-identical logs; wall-clock stamping is opt-in
/// for live runs.
class EventLog {
 public:
  enum class TimeMode { logical, wall };

  explicit EventLog(TimeMode mode = TimeMode::logical) : mode_(mode) {}

  /// Adds schema version and timestamp, then appends. Thread-safe.
  void emit(nlohmann::json event);

  /// Appends every entry of another log, restamping in this log's order.
  void absorb(const EventLog& other);

  std::vector<nlohmann::json> entries() const;
  std::size_t size() const;

  /// Serialized JSONL, one event per line (sorted keys, deterministic).
  std::string text() const;

 private:
  TimeMode mode_;
  mutable std::mutex mu_;
  std::vector<nlohmann::json> entries_;
  std::uint64_t next_ts_ = 1;
};

}  // namespace bats
