#include "bats/events.hpp"

#include <chrono>

namespace bats {

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

std::string digest_hex(std::string_view data) {
  static const char* hex = "0123456789abcdef";
  std::uint64_t h = fnv1a64(data);
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = hex[h & 0xf];
    h >>= 4;
  }
  return out;
}

void EventLog::emit(nlohmann::json event) {
  std::lock_guard<std::mutex> lock(mu_);
  event["v"] = 1;
  if (mode_ == TimeMode::logical) {
    event["ts"] = next_ts_++;
  } else {
    event["ts"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::system_clock::now().time_since_epoch())
                      .count();
  }
  entries_.push_back(std::move(event));
}

void EventLog::absorb(const EventLog& other) {
  for (auto e : other.entries()) {
    e.erase("ts");
    e.erase("v");
    emit(std::move(e));
  }
}

std::vector<nlohmann::json> EventLog::entries() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_;
}

std::size_t EventLog::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_.size();
}

std::string EventLog::text() const {
  std::lock_guard<std::mutex> lock(mu_);
  std::string out;
  for (const auto& e : entries_) {
    out += e.dump();
    out += "\n";
  }
  return out;
}

}  // namespace bats
