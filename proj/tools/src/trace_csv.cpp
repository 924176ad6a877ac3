#include "ctgp_cli/trace_csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

#include "ctgp/errors.hpp"

namespace ctgp::cli {

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_point(const DomainGrid& grid, std::size_t index) {
  const auto p = grid.point(index);
  std::string out;
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    if (j) out += ';';
    out += format_real(p(j));
  }
  return out;
}

TraceRow to_row(const RoundRecord& rec, std::string_view policy, const DomainGrid& grid) {
  TraceRow row;
  row.t = rec.t;
  row.policy = std::string(policy);
  row.instance = instance_label(rec.instance, rec.layer);
  row.x_index = rec.x_index;
  row.x_value = format_point(grid, rec.x_index);
  row.y_clean = rec.y_clean;
  row.corruption = rec.corruption;
  row.y_tilde = rec.y_tilde;
  row.instant_regret = rec.instant_regret;
  row.cum_regret = rec.cum_regret;
  row.ledger_spent = rec.ledger_spent;
  row.is_valid = rec.is_valid;
  return row;
}

void write_trace_csv(std::ostream& out, std::string_view policy, const std::vector<RoundRecord>& trace,
                     const DomainGrid& grid) {
  out << kTraceHeader << '\n';
  for (const RoundRecord& rec : trace) {
    const TraceRow r = to_row(rec, policy, grid);
    out << r.t << ',' << r.policy << ',' << r.instance << ',' << r.x_index << ',' << r.x_value << ','
        << format_real(r.y_clean) << ',' << format_real(r.corruption) << ',' << format_real(r.y_tilde) << ','
        << format_real(r.instant_regret) << ',' << format_real(r.cum_regret) << ','
        << format_real(r.ledger_spent) << ',' << (r.is_valid ? 1 : 0) << '\n';
  }
}

namespace {

double parse_real(const std::string& s, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') throw InputError("trace line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

std::size_t parse_count(const std::string& s, std::size_t line) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
    throw InputError("trace line " + std::to_string(line) + ": bad integer '" + s + "'");
  }
  return std::stoull(s);
}

}  // namespace

std::vector<TraceRow> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) throw InputError("trace: missing or unexpected header");
  std::vector<TraceRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 12) throw InputError("trace line " + std::to_string(lineno) + ": expected 12 fields");
    TraceRow r;
    r.t = parse_count(f[0], lineno);
    r.policy = f[1];
    r.instance = f[2];
    r.x_index = parse_count(f[3], lineno);
    r.x_value = f[4];
    r.y_clean = parse_real(f[5], lineno);
    r.corruption = parse_real(f[6], lineno);
    r.y_tilde = parse_real(f[7], lineno);
    r.instant_regret = parse_real(f[8], lineno);
    r.cum_regret = parse_real(f[9], lineno);
    r.ledger_spent = parse_real(f[10], lineno);
    if (f[11] != "0" && f[11] != "1") throw InputError("trace line " + std::to_string(lineno) + ": bad is_valid");
    r.is_valid = f[11] == "1";
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace ctgp::cli
