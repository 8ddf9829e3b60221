#pragma once

// Rendering and parsing of study reports.
//
// CSV   header: method,sample_size,mean_estimate,bias,mse,variance,ci_coverage_percent,boundary_hits
//       one row per cell, numbers with 12 significant digits.
// JSON  {"config": {...}, "cells": [{...}, ...]}, shortest round-trip doubles.
// Markdown  the simulation table layout: one column per (sample size, method),
//       rows E(n̂), Bias(n̂), MSE(n̂), Var(n̂), "% of n in CI".
//
// The runtime is deliberately left out of every format so that identical
// studies render byte-identically.

#include <cstdio>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dtsp/error.hpp"
#include "dtsp/estimation.hpp"
#include "dtsp/simulation.hpp"

namespace dtsp {

enum class ReportFormat { Csv, Json, Markdown };

inline ReportFormat parse_format(std::string_view s) {
  if (s == "csv") return ReportFormat::Csv;
  if (s == "json") return ReportFormat::Json;
  if (s == "markdown") return ReportFormat::Markdown;
  throw Error(ErrorKind::InvalidConfig, "unknown format '" + std::string(s) + "'");
}

/// Fixed 12-significant-digit text used for CSV and markdown output.
inline std::string format_sig12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline Method parse_method(std::string_view s) {
  if (s == "MLE" || s == "mle") return Method::MLE;
  if (s == "MME" || s == "mme") return Method::MME;
  throw Error(ErrorKind::ParseError, "unknown method '" + std::string(s) + "'");
}

inline constexpr std::string_view kReportCsvHeader =
    "method,sample_size,mean_estimate,bias,mse,variance,ci_coverage_percent,boundary_hits";

inline nlohmann::json params_to_json(const DtspParams& p) {
  return {{"a", p.a}, {"m", p.m}, {"b", p.b}, {"n", p.n}};
}

inline DtspParams params_from_json(const nlohmann::json& j) {
  return make_params(j.at("a").get<double>(), j.at("m").get<double>(), j.at("b").get<double>(),
                     j.at("n").get<double>());
}

inline nlohmann::json report_to_json(const StudyReport& r) {
  nlohmann::json methods = nlohmann::json::array();
  for (auto m : r.config.methods) methods.push_back(std::string(to_string(m)));
  nlohmann::json cfg = {
      {"params", params_to_json(r.config.params)},
      {"sample_sizes", r.config.sample_sizes},
      {"replicates", r.config.replicates},
      {"methods", methods},
      {"master_seed", r.config.master_seed},
      {"n_lo", r.config.options.n_lo},
      {"n_hi", r.config.options.n_hi},
      {"tolerance", r.config.options.tolerance},
  };
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : r.cells) {
    cells.push_back({{"method", std::string(to_string(c.method))},
                     {"sample_size", c.sample_size},
                     {"mean_estimate", c.mean_estimate},
                     {"bias", c.bias},
                     {"mse", c.mse},
                     {"variance", c.variance},
                     {"ci_coverage_percent", c.ci_coverage_percent},
                     {"boundary_hits", c.boundary_hits},
                     {"failures", c.failures}});
  }
  return {{"config", cfg}, {"cells", cells}};
}

inline StudyReport report_from_json(const nlohmann::json& j) {
  try {
    StudyReport r;
    const auto& cfg = j.at("config");
    r.config.params = params_from_json(cfg.at("params"));
    r.config.sample_sizes = cfg.at("sample_sizes").get<std::vector<std::size_t>>();
    r.config.replicates = cfg.at("replicates").get<std::size_t>();
    r.config.methods.clear();
    for (const auto& m : cfg.at("methods")) r.config.methods.push_back(parse_method(m.get<std::string>()));
    r.config.master_seed = cfg.at("master_seed").get<std::uint64_t>();
    r.config.options.n_lo = cfg.at("n_lo").get<double>();
    r.config.options.n_hi = cfg.at("n_hi").get<double>();
    r.config.options.tolerance = cfg.at("tolerance").get<double>();
    for (const auto& c : j.at("cells")) {
      StudyCell cell;
      cell.method = parse_method(c.at("method").get<std::string>());
      cell.sample_size = c.at("sample_size").get<std::size_t>();
      cell.mean_estimate = c.at("mean_estimate").get<double>();
      cell.bias = c.at("bias").get<double>();
      cell.mse = c.at("mse").get<double>();
      cell.variance = c.at("variance").get<double>();
      cell.ci_coverage_percent = c.at("ci_coverage_percent").get<double>();
      cell.boundary_hits = c.at("boundary_hits").get<std::size_t>();
      cell.failures = c.value("failures", std::size_t{0});
      r.cells.push_back(cell);
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("report json: ") + e.what());
  }
}

inline std::string render_csv(const StudyReport& r) {
  std::string out(kReportCsvHeader);
  out += '\n';
  for (const auto& c : r.cells) {
    out += std::string(to_string(c.method)) + ',' + std::to_string(c.sample_size) + ',' +
           format_sig12(c.mean_estimate) + ',' + format_sig12(c.bias) + ',' + format_sig12(c.mse) + ',' +
           format_sig12(c.variance) + ',' + format_sig12(c.ci_coverage_percent) + ',' +
           std::to_string(c.boundary_hits) + '\n';
  }
  return out;
}

/// Parses the CSV produced by render_csv back into cells.
inline std::vector<StudyCell> cells_from_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kReportCsvHeader) {
    throw Error(ErrorKind::ParseError, "report csv: unexpected header");
  }
  std::vector<StudyCell> cells;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream ls(line);
    for (std::string tok; std::getline(ls, tok, ',');) f.push_back(tok);
    if (f.size() != 8) {
      throw Error(ErrorKind::ParseError, "report csv line " + std::to_string(line_no) + ": expected 8 fields");
    }
    try {
      StudyCell c;
      c.method = parse_method(f[0]);
      c.sample_size = std::stoull(f[1]);
      c.mean_estimate = std::stod(f[2]);
      c.bias = std::stod(f[3]);
      c.mse = std::stod(f[4]);
      c.variance = std::stod(f[5]);
      c.ci_coverage_percent = std::stod(f[6]);
      c.boundary_hits = std::stoull(f[7]);
      cells.push_back(c);
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::ParseError, "report csv line " + std::to_string(line_no) + ": bad number");
    }
  }
  return cells;
}

inline std::string render_markdown(const StudyReport& r) {
  const auto& p = r.config.params;
  std::ostringstream out;
  out << "Results of simulation from DTSP(a, m, b, n) distribution for a = " << p.a << ", m = " << p.m
      << ", b = " << p.b << ", n = " << format_sig12(p.n) << " (" << r.config.replicates
      << " replicates, seed " << r.config.master_seed << ")\n\n";

  // Columns: sizes in config order, methods within each size.
  std::vector<const StudyCell*> cols;
  for (auto size : r.config.sample_sizes) {
    for (auto m : r.config.methods) {
      if (const auto* c = find_cell(r, m, size)) cols.push_back(c);
    }
  }
  out << "| Parameter value | Sample size → estimates ↓ |";
  for (const auto* c : cols) out << ' ' << c->sample_size << ' ' << to_string(c->method) << " |";
  out << "\n|---|---|";
  for (std::size_t i = 0; i < cols.size(); ++i) out << "---|";
  out << '\n';

  const auto row = [&](std::string_view first, std::string_view label, auto&& value) {
    out << "| " << first << " | " << label << " |";
    for (const auto* c : cols) out << ' ' << format_sig12(value(*c)) << " |";
    out << '\n';
  };
  const std::string pv = "n = " + format_sig12(p.n);
  row(pv, "E(n̂)", [](const StudyCell& c) { return c.mean_estimate; });
  row("", "Bias(n̂)", [](const StudyCell& c) { return c.bias; });
  row("", "MSE(n̂)", [](const StudyCell& c) { return c.mse; });
  row("", "Var(n̂)", [](const StudyCell& c) { return c.variance; });
  row("", "% of n in CI", [](const StudyCell& c) { return c.ci_coverage_percent; });

  bool any = false;
  for (const auto* c : cols) any = any || c->boundary_hits > 0 || c->failures > 0;
  if (any) {
    out << "\nBoundary hits / failed fits:";
    for (const auto* c : cols) {
      out << ' ' << c->sample_size << ' ' << to_string(c->method) << ": " << c->boundary_hits << '/'
          << c->failures << ';';
    }
    out << '\n';
  }
  return out.str();
}

inline std::string render_report(const StudyReport& r, ReportFormat format) {
  switch (format) {
    case ReportFormat::Csv: return render_csv(r);
    case ReportFormat::Json: return report_to_json(r).dump(2) + '\n';
    case ReportFormat::Markdown: return render_markdown(r);
  }
  return {};
}

}  // namespace dtsp
