#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "ctgp/kernels.hpp"
#include "ctgp/simulator.hpp"

namespace ctgp::cli {

inline constexpr std::string_view kTraceHeader =
    "t,policy,instance,x_index,x_value,y_clean,corruption,y_tilde,instant_regret,cum_regret,ledger_spent,is_valid";

/// One parsed trace line. Reals are written with 17 significant digits, so
/// they read back bit-identical.
struct TraceRow {
  std::size_t t = 0;
  std::string policy;
  std::string instance;
  std::size_t x_index = 0;
  std::string x_value;  // coordinates joined by ';'
  double y_clean = 0.0;
  double corruption = 0.0;
  double y_tilde = 0.0;
  double instant_regret = 0.0;
  double cum_regret = 0.0;
  double ledger_spent = 0.0;
  bool is_valid = true;

  bool operator==(const TraceRow&) const = default;
};

/// %.17g; the shortest form is not needed, only exactness.
std::string format_real(double v);
std::string format_point(const DomainGrid& grid, std::size_t index);

TraceRow to_row(const RoundRecord& rec, std::string_view policy, const DomainGrid& grid);

void write_trace_csv(std::ostream& out, std::string_view policy, const std::vector<RoundRecord>& trace,
                     const DomainGrid& grid);
/// Throws InputError naming the offending line.
std::vector<TraceRow> read_trace_csv(std::istream& in);

}  // namespace ctgp::cli
