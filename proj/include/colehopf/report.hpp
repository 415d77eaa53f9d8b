#pragma once

#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "colehopf/config.hpp"
#include "colehopf/io.hpp"
#include "colehopf/verify.hpp"

namespace colehopf {

/// Exit status for an error kind: 1 configuration, 3 non-periodic ramp, 2 runtime.
inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config:
    case ErrorKind::ShapeMismatch:
    case ErrorKind::ZeroDispersion:
    case ErrorKind::NotPowerOfTwo:
    case ErrorKind::DomainOrder:
    case ErrorKind::LengthMismatch:
    case ErrorKind::AnchorOutOfRange:
      return 1;
    case ErrorKind::NonPeriodicRamp:
      return 3;
    default:
      return 2;
  }
}

struct SweepRow {
  double value = 0.0;
  bool ok = false;
  int error_code = 0;
  std::string message;
  double norm_drift = std::numeric_limits<double>::quiet_NaN();
  double equivalence_gap = std::numeric_limits<double>::quiet_NaN();
  double observed_order = std::numeric_limits<double>::quiet_NaN();
};

struct SweepResult {
  std::string axis;
  std::vector<SweepRow> rows;

  bool all_ok() const {
    for (const auto& r : rows)
      if (!r.ok) return false;
    return true;
  }
};

/// Adjustments applied to every parsed config (command-line overrides).
using ConfigAdjust = std::function<void(RunConfig&)>;

/// Parses "key=v1,v2,..." into an axis name and values.
inline std::pair<std::string, std::vector<double>> parse_sweep_arg(const std::string& arg) {
  const auto eq = arg.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == arg.size())
    throw Error(ErrorKind::Config, "--sweep expects key=v1,v2,... (got '" + arg + "')");
  std::vector<double> values;
  std::stringstream ss(arg.substr(eq + 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto v = parse_double(item);
    if (!v || !std::isfinite(*v)) throw Error(ErrorKind::Config, "--sweep: '" + item + "' is not a number");
    values.push_back(*v);
  }
  return {arg.substr(0, eq), values};
}

/// Runs the gauge-equivalence experiment for each value of one numeric config
/// key. Row failures are recorded inline; rows keep the input order.
inline SweepResult sweep(const Json& base, const std::string& axis, const std::vector<double>& values,
                         const ConfigAdjust& adjust = {}) {
  if (values.empty()) throw Error(ErrorKind::Config, "sweep over '" + axis + "' has no values");
  // Axes address the normalized config, so defaulted keys can be swept too.
  const Json doc0 = to_json(parse_config(base));
  {
    // Reject a bad axis before running anything.
    Json probe = doc0;
    const auto* node = &probe;
    std::stringstream ss(axis);
    std::string part;
    while (std::getline(ss, part, '.')) {
      if (node->is_object() && node->contains(part))
        node = &(*node)[part];
      else if (node->is_array() && !part.empty() && part.find_first_not_of("0123456789") == std::string::npos &&
               std::stoul(part) < node->size())
        node = &(*node)[std::stoul(part)];
      else
        throw Error(ErrorKind::Config, "sweep axis '" + axis + "' is not a key of the config");
    }
    if (!node->is_number()) throw Error(ErrorKind::Config, "sweep axis '" + axis + "' is not a numeric key");
  }

  SweepResult result{axis, {}};
  for (double v : values) {
    SweepRow row;
    row.value = v;
    try {
      Json doc = doc0;
      set_numeric_key(doc, axis, v);
      auto cfg = parse_config(doc);
      if (adjust) adjust(cfg);
      const auto outcome = run_verify(cfg);
      row.norm_drift = outcome.norm_drift;
      row.equivalence_gap = outcome.equivalence_gap;
      const auto psi0 = psi_state(cfg);
      row.observed_order = self_convergence(psi0, cfg.time.dt, cfg.time.t_end, cfg.convergence.levels,
                                            cfg.convergence.reference_divisor)
                               .observed_order;
      if (outcome.within_tolerance) {
        row.ok = true;
      } else {
        row.error_code = 2;
        row.message = "equivalence gap " + format_double(outcome.equivalence_gap) + " exceeds tolerance " +
                      format_double(cfg.tolerance);
      }
    } catch (const Error& e) {
      row.ok = false;
      row.error_code = exit_code(e.kind());
      row.message = e.what();
    }
    result.rows.push_back(std::move(row));
  }
  return result;
}

namespace detail {

inline std::string csv_text(std::string s) {
  for (auto& ch : s)
    if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
  return s;
}

}  // namespace detail

inline void write_sweep_csv(const std::filesystem::path& path, const SweepResult& r) {
  CsvWriter csv(path, {"axis", "value", "status", "error_code", "message", "norm_drift", "equivalence_gap",
                       "observed_order"});
  for (const auto& row : r.rows)
    csv.write_row({r.axis, format_double(row.value), row.ok ? "ok" : "failed", std::to_string(row.error_code),
                   detail::csv_text(row.message), format_double(row.norm_drift), format_double(row.equivalence_gap),
                   format_double(row.observed_order)});
}

}  // namespace colehopf
