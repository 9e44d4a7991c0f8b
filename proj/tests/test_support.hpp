#pragma once

// Independent oracles and fixtures shared by the unit and acceptance suites.
// Nothing here calls the code path it is used to check.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tcgw/digest.hpp"
#include "tcgw/error.hpp"
#include "tcgw/gateway.hpp"
#include "tcgw/ledger.hpp"
#include "tcgw/private_chain.hpp"

namespace tcgw::testing {

// Recursive Merkle root: split the leaf list into pairs top-down by building
// each level as an explicit string of concatenated digests.
inline Digest reference_merkle(std::vector<Digest> level) {
  if (level.empty()) return sha256(std::string_view{});
  if (level.size() == 1) return level[0];
  if (level.size() % 2 == 1) level.push_back(level.back());
  std::vector<Digest> parents;
  for (std::size_t i = 0; i < level.size(); i += 2) {
    std::string joined(reinterpret_cast<const char*>(level[i].data()), 32);
    joined.append(reinterpret_cast<const char*>(level[i + 1].data()), 32);
    parents.push_back(sha256(joined));
  }
  return reference_merkle(std::move(parents));
}

struct RefStats {
  std::uint64_t count = 0;
  double mean = 0, std_dev = 0, min = 0, max = 0;
};

// Two-pass mean / population standard deviation in extended precision, with
// the usual correction term for the rounding error left in the mean.
inline std::map<Metric, RefStats> two_pass_stats(const std::vector<SensorReading>& readings) {
  std::map<Metric, std::vector<double>> groups;
  for (const auto& r : readings) groups[r.metric].push_back(std::stod(r.value));
  std::map<Metric, RefStats> out;
  for (auto& [m, v] : groups) {
    RefStats s;
    s.count = v.size();
    const auto n = static_cast<long double>(v.size());
    long double sum = 0;
    for (double x : v) sum += x;
    const long double mean = sum / n;
    long double ss = 0, resid = 0;
    for (double x : v) {
      ss += (x - mean) * (x - mean);
      resid += x - mean;
    }
    ss -= resid * resid / n;
    s.mean = static_cast<double>(mean);
    s.std_dev = static_cast<double>(std::sqrt(std::max(ss, 0.0L) / n));
    s.min = *std::min_element(v.begin(), v.end());
    s.max = *std::max_element(v.begin(), v.end());
    out[m] = s;
  }
  return out;
}

inline bool rel_close(double a, double b, double tol = 1e-9) {
  if (a == b) return true;
  double scale = std::max(std::fabs(a), std::fabs(b));
  return std::fabs(a - b) <= tol * std::max(scale, 1e-300) || std::fabs(a - b) <= 1e-12;
}

inline bool stats_match_reference(const std::vector<MetricStats>& got,
                                  const std::map<Metric, RefStats>& want, double tol = 1e-9) {
  if (got.size() != want.size()) return false;
  for (const auto& s : got) {
    auto it = want.find(s.metric);
    if (it == want.end()) return false;
    const RefStats& r = it->second;
    if (s.count != r.count || !rel_close(s.mean, r.mean, tol) ||
        !rel_close(s.std_dev, r.std_dev, tol) || !rel_close(s.min, r.min, tol) ||
        !rel_close(s.max, r.max, tol)) {
      return false;
    }
  }
  return true;
}

inline Transaction reading_tx(const std::string& channel, const std::string& sensor,
                              Metric metric, const std::string& value, Timestamp ts) {
  return make_reading_transaction(channel, SensorReading{sensor, metric, value, ts});
}

// Ledger with `blocks` appended blocks of `per_block` readings each.
inline Ledger build_ledger(std::size_t blocks, std::size_t per_block,
                           const std::string& chain = "fieldA") {
  Ledger ledger = genesis(chain);
  Timestamp ts = 1000;
  for (std::size_t b = 0; b < blocks; ++b) {
    std::vector<Transaction> txs;
    for (std::size_t i = 0; i < per_block; ++i) {
      txs.push_back(reading_tx(chain, "s1", Metric::TemperatureC,
                               std::to_string(10 + (b * per_block + i) % 20) + ".5", ts));
      ts += 60;
    }
    ledger = append_block(std::move(ledger), std::move(txs), ts).first;
  }
  return ledger;
}

// Error code thrown by fn, or nullopt if it returned normally.
template <typename Fn>
std::optional<ErrorCode> code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace tcgw::testing
