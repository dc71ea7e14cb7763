#pragma once

// Line-delimited transcript of a protocol run: one JSON object per round with
// fields in the fixed order phase, index, inputs, announced, outcomes.

#include <cstddef>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace diqpq {

using ordered_json = nlohmann::ordered_json;

struct TranscriptRecord {
  std::string phase;
  std::size_t index = 0;
  ordered_json inputs = ordered_json::object();
  ordered_json announced = ordered_json::object();
  ordered_json outcomes = ordered_json::object();

  ordered_json to_json() const {
    ordered_json j;
    j["phase"] = phase;
    j["index"] = index;
    j["inputs"] = inputs;
    j["announced"] = announced;
    j["outcomes"] = outcomes;
    return j;
  }
};

class Transcript {
 public:
  void add(TranscriptRecord r) { records_.push_back(std::move(r)); }

  void append(const Transcript& other) {
    records_.insert(records_.end(), other.records_.begin(), other.records_.end());
  }

  const std::vector<TranscriptRecord>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }

  void write_jsonl(std::ostream& os) const {
    for (const auto& r : records_) os << r.to_json().dump() << '\n';
  }

  std::string to_jsonl() const {
    std::ostringstream os;
    write_jsonl(os);
    return os.str();
  }

 private:
  std::vector<TranscriptRecord> records_;
};

}  // namespace diqpq
