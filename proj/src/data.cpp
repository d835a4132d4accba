#include "nphkit/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nphkit {

SurvivalDataset::SurvivalDataset(std::vector<Record> records)
    : records_(std::move(records)) {
  for (const auto& r : records_) {
    if (!(r.time >= 0.0) || !std::isfinite(r.time)) {
      throw std::invalid_argument("SurvivalDataset: times must be finite and >= 0");
    }
    if (r.arm < -1 || r.arm > 1) {
      throw std::invalid_argument("SurvivalDataset: arm must be 0, 1, or absent (-1)");
    }
  }
}

bool SurvivalDataset::has_two_arms() const {
  bool a0 = false, a1 = false;
  for (const auto& r : records_) {
    if (r.arm == 0) a0 = true;
    if (r.arm == 1) a1 = true;
  }
  return a0 && a1;
}

std::size_t SurvivalDataset::n_events() const {
  std::size_t n = 0;
  for (const auto& r : records_) n += r.event ? 1 : 0;
  return n;
}

SurvivalDataset SurvivalDataset::arm_subset(int arm) const {
  std::vector<Record> out;
  for (const auto& r : records_) {
    if (r.arm == arm) out.push_back(r);
  }
  return SurvivalDataset(std::move(out));
}

SurvivalDataset SurvivalDataset::swap_arms() const {
  std::vector<Record> out = records_;
  for (auto& r : out) {
    if (r.arm == 0) {
      r.arm = 1;
    } else if (r.arm == 1) {
      r.arm = 0;
    }
  }
  return SurvivalDataset(std::move(out));
}

namespace {

EventTable build_table(const SurvivalDataset& data, bool split_arms) {
  if (data.empty()) {
    throw std::invalid_argument("build_event_table: empty dataset");
  }
  if (split_arms && !data.has_two_arms()) {
    throw std::invalid_argument("build_event_table: two arms required");
  }
  std::vector<Record> recs = data.records();
  std::sort(recs.begin(), recs.end(),
            [](const Record& a, const Record& b) { return a.time < b.time; });

  EventTable table;
  long y0 = 0, y1 = 0;
  if (split_arms) {
    for (const auto& r : recs) (r.arm == 1 ? y1 : y0)++;
  } else {
    y0 = static_cast<long>(recs.size());
  }
  std::size_t i = 0;
  while (i < recs.size()) {
    double t = recs[i].time;
    long d0 = 0, d1 = 0, leave0 = 0, leave1 = 0;
    for (; i < recs.size() && recs[i].time == t; ++i) {
      bool in1 = split_arms && recs[i].arm == 1;
      (in1 ? leave1 : leave0)++;
      if (recs[i].event) (in1 ? d1 : d0)++;
    }
    if (d0 + d1 > 0) {
      // censorings at t are processed after events at t, so everyone
      // observed at t counts in the risk set of this row.
      table.rows.push_back({t, y0 + y1, y0, y1, d0 + d1, d0, d1});
    }
    y0 -= leave0;
    y1 -= leave1;
  }
  return table;
}

}  // namespace

EventTable build_event_table(const SurvivalDataset& data) {
  return build_table(data, true);
}

EventTable build_event_table_pooled(const SurvivalDataset& data) {
  return build_table(data, false);
}

SurvivalDataset read_ipd_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open IPD CSV: " + path);
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error(path + ": empty file");
  }
  // tolerate a UTF-8 BOM and trailing CR
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "time,event,arm") {
    throw std::runtime_error(path + ":1: expected header `time,event,arm`");
  }
  std::vector<Record> recs;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string f1, f2, f3;
    if (!std::getline(ss, f1, ',') || !std::getline(ss, f2, ',') ||
        !std::getline(ss, f3)) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected 3 comma-separated fields");
    }
    Record r;
    try {
      r.time = std::stod(f1);
      int ev = std::stoi(f2);
      int arm = std::stoi(f3);
      if ((ev != 0 && ev != 1) || (arm != 0 && arm != 1)) {
        throw std::invalid_argument("range");
      }
      r.event = ev == 1;
      r.arm = arm;
    } catch (const std::exception&) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": malformed row `" + line + "`");
    }
    if (!(r.time >= 0.0) || !std::isfinite(r.time)) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": time must be finite and >= 0");
    }
    recs.push_back(r);
  }
  return SurvivalDataset(std::move(recs));
}

void write_ipd_csv(const SurvivalDataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write IPD CSV: " + path);
  out << "time,event,arm\n";
  out.precision(17);
  for (const auto& r : data.records()) {
    out << r.time << ',' << (r.event ? 1 : 0) << ',' << r.arm << '\n';
  }
}

}  // namespace nphkit
