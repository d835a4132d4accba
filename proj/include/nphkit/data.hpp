#pragma once

#include <string>
#include <vector>

namespace nphkit {

// One subject-level observation: follow-up time in months, whether the
// event was observed (false = right-censored), and the trial arm
// (0 = control, 1 = treatment, -1 = single-arm data with no arm label).
struct Record {
  double time = 0.0;
  bool event = false;
  int arm = -1;
};

// Subject-level time-to-event data. Records need not be sorted;
// operations sort internally.
class SurvivalDataset {
 public:
  SurvivalDataset() = default;
  explicit SurvivalDataset(std::vector<Record> records);

  const std::vector<Record>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  bool has_two_arms() const;
  std::size_t n_events() const;

  // Subset containing only the given arm, with arm labels kept.
  SurvivalDataset arm_subset(int arm) const;
  // Copy with arm labels 0<->1 exchanged.
  SurvivalDataset swap_arms() const;

 private:
  std::vector<Record> records_;
};

// Risk-set and event-count summaries at the distinct observed event
// times, in ascending order. Censored subjects at time t stay in the
// risk set for the event row at t.
struct EventRow {
  double time = 0.0;
  long at_risk = 0;      // Y
  long at_risk0 = 0;     // Y0
  long at_risk1 = 0;     // Y1
  long events = 0;       // dN
  long events0 = 0;      // dN0
  long events1 = 0;      // dN1
};

struct EventTable {
  std::vector<EventRow> rows;
};

// Requires a nonempty two-arm dataset; throws std::invalid_argument
// otherwise. Returns one row per distinct time with >= 1 event.
EventTable build_event_table(const SurvivalDataset& data);

// Pooled (arm-blind) event table for one-sample summaries; accepts
// single-arm data.
EventTable build_event_table_pooled(const SurvivalDataset& data);

// Reads an IPD CSV with header `time,event,arm`. Throws
// std::runtime_error with the offending line number on malformed input.
SurvivalDataset read_ipd_csv(const std::string& path);
void write_ipd_csv(const SurvivalDataset& data, const std::string& path);

}  // namespace nphkit
