// dtsp: command-line front end for the DTSP library.
//
//   dtsp pmf       --a A --m M --b B --n N [--format csv|json|markdown]
//   dtsp moments   --a A --m M --b B --n N
//   dtsp sample    --a A --m M --b B --n N --count K --seed S
//   dtsp fit       [--a A --m M --b B | --auto-endpoints] [--data FILE] [--method mle|mme|both]
//   dtsp simulate  --a A --m M --b B --n N --seed S [--sizes 25,50,100] [--replicates 1000]
//                  [--method both] [--threads T] [--timing]
//
// Exit codes: 0 success, 1 usage/validation, 2 data error, 3 numerical failure.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dtsp/dtsp.hpp"
#include "dtsp/error.hpp"
#include "dtsp/estimation.hpp"
#include "dtsp/report.hpp"
#include "dtsp/rng.hpp"
#include "dtsp/sampling.hpp"
#include "dtsp/simulation.hpp"

namespace {

using dtsp::Error;
using dtsp::ErrorKind;
using dtsp::format_sig12;
using nlohmann::json;

struct DistFlags {
  std::optional<double> a, m, b, n;
};

void add_dist_flags(CLI::App* cmd, DistFlags& f, bool with_shape) {
  cmd->add_option("--a", f.a, "lower support endpoint (integer)");
  cmd->add_option("--m", f.m, "threshold (integer, a <= m <= b)");
  cmd->add_option("--b", f.b, "one past the upper support point (integer)");
  if (with_shape) cmd->add_option("--n", f.n, "shape (> 0)");
}

dtsp::DtspParams require_params(const DistFlags& f, bool need_shape = true) {
  if (!f.a || !f.m || !f.b) throw Error(ErrorKind::InvalidParameter, "--a, --m and --b are required");
  if (need_shape && !f.n) throw Error(ErrorKind::InvalidParameter, "--n is required");
  return dtsp::make_params(*f.a, *f.m, *f.b, need_shape ? *f.n : 1.0);
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptyData:
    case ErrorKind::DataOutOfSupport:
    case ErrorKind::ParseError:
      return 2;
    case ErrorKind::NumericalFailure:
      return 3;
    default:
      return 1;
  }
}

std::string markdown_table(const std::vector<std::string>& header,
                           const std::vector<std::vector<std::string>>& rows) {
  std::string out = "|";
  for (const auto& h : header) out += ' ' + h + " |";
  out += "\n|";
  for (std::size_t i = 0; i < header.size(); ++i) out += "---|";
  out += '\n';
  for (const auto& r : rows) {
    out += '|';
    for (const auto& v : r) out += ' ' + v + " |";
    out += '\n';
  }
  return out;
}

std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
  std::string out;
  const auto line = [&](const std::vector<std::string>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i];
    out += '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

std::string render_pmf(const dtsp::DtspParams& p, dtsp::ReportFormat fmt) {
  const std::vector<std::string> header{"y", "pmf", "cdf", "survival", "hazard"};
  json arr = json::array();
  std::vector<std::vector<std::string>> rows;
  for (const auto& [y, prob] : dtsp::pmf_table(p)) {
    const double c = dtsp::cdf(p, y);
    const double s = dtsp::survival(p, y);
    const double h = dtsp::hazard(p, y);
    arr.push_back({{"y", y}, {"pmf", prob}, {"cdf", c}, {"survival", s}, {"hazard", h}});
    rows.push_back({std::to_string(y), format_sig12(prob), format_sig12(c), format_sig12(s), format_sig12(h)});
  }
  switch (fmt) {
    case dtsp::ReportFormat::Json: return arr.dump(2) + '\n';
    case dtsp::ReportFormat::Markdown: return markdown_table(header, rows);
    case dtsp::ReportFormat::Csv: break;
  }
  return csv_table(header, rows);
}

std::string render_moments(const dtsp::DtspParams& p, dtsp::ReportFormat fmt) {
  const auto closed = dtsp::moments(p);
  const auto summed = dtsp::moments_by_summation(p);
  const auto bounds = dtsp::discretization_bounds(p);
  const auto modes = dtsp::mode_set(p);
  const auto med = dtsp::median(p);

  std::string mode_text;
  for (std::size_t i = 0; i < modes.size(); ++i) mode_text += (i ? ";" : "") + std::to_string(modes[i]);

  json j = {
      {"mean", closed.mean},
      {"variance", closed.variance},
      {"second_moment", closed.second_moment},
      {"index_of_dispersion", closed.index_of_dispersion ? json(*closed.index_of_dispersion) : json(nullptr)},
      {"modes", modes},
      {"median", med},
      {"mean_summation", summed.mean},
      {"second_moment_summation", summed.second_moment},
      {"variance_summation", summed.variance},
      {"mean_abs_diff", std::fabs(closed.mean - summed.mean)},
      {"second_moment_abs_diff", std::fabs(closed.second_moment - summed.second_moment)},
      {"tsp_mean", bounds.continuous_mean},
      {"tsp_variance", bounds.continuous_variance},
      {"mean_bound_holds", bounds.mean_within},
      {"variance_bound_holds", bounds.variance_within},
  };
  if (fmt == dtsp::ReportFormat::Json) return j.dump(2) + '\n';

  const auto b2s = [](bool v) { return std::string(v ? "true" : "false"); };
  const std::vector<std::pair<std::string, std::string>> fields{
      {"mean", format_sig12(closed.mean)},
      {"variance", format_sig12(closed.variance)},
      {"second_moment", format_sig12(closed.second_moment)},
      {"index_of_dispersion",
       closed.index_of_dispersion ? format_sig12(*closed.index_of_dispersion) : "undefined"},
      {"modes", mode_text},
      {"median", std::to_string(med)},
      {"mean_summation", format_sig12(summed.mean)},
      {"second_moment_summation", format_sig12(summed.second_moment)},
      {"variance_summation", format_sig12(summed.variance)},
      {"mean_abs_diff", format_sig12(std::fabs(closed.mean - summed.mean))},
      {"second_moment_abs_diff", format_sig12(std::fabs(closed.second_moment - summed.second_moment))},
      {"tsp_mean", format_sig12(bounds.continuous_mean)},
      {"tsp_variance", format_sig12(bounds.continuous_variance)},
      {"mean_bound_holds", b2s(bounds.mean_within)},
      {"variance_bound_holds", b2s(bounds.variance_within)},
  };
  if (fmt == dtsp::ReportFormat::Markdown) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& [k, v] : fields) rows.push_back({k, v});
    return markdown_table({"quantity", "value"}, rows);
  }
  std::vector<std::string> header, values;
  for (const auto& [k, v] : fields) {
    header.push_back(k);
    values.push_back(v);
  }
  return csv_table(header, {values});
}

std::string render_fit(const std::vector<dtsp::EstimationResult>& results, const dtsp::Endpoints& ends,
                       bool auto_endpoints, dtsp::ReportFormat fmt) {
  const std::vector<std::string> header{"method", "n_hat",   "status", "objective", "iterations",
                                        "moment_order_used", "a", "m", "b", "auto_endpoints"};
  json arr = json::array();
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : results) {
    arr.push_back({{"method", std::string(dtsp::to_string(r.method))},
                   {"n_hat", r.n_hat},
                   {"status", std::string(dtsp::to_string(r.status))},
                   {"objective", r.objective},
                   {"iterations", r.iterations},
                   {"moment_order_used", r.moment_order_used ? json(*r.moment_order_used) : json(nullptr)},
                   {"a", ends.a},
                   {"m", ends.m},
                   {"b", ends.b},
                   {"auto_endpoints", auto_endpoints}});
    rows.push_back({std::string(dtsp::to_string(r.method)), format_sig12(r.n_hat),
                    std::string(dtsp::to_string(r.status)), format_sig12(r.objective),
                    std::to_string(r.iterations),
                    r.moment_order_used ? std::to_string(*r.moment_order_used) : "",
                    std::to_string(ends.a), std::to_string(ends.m), std::to_string(ends.b),
                    auto_endpoints ? "true" : "false"});
  }
  switch (fmt) {
    case dtsp::ReportFormat::Json: return arr.dump(2) + '\n';
    case dtsp::ReportFormat::Markdown: return markdown_table(header, rows);
    case dtsp::ReportFormat::Csv: break;
  }
  return csv_table(header, rows);
}

std::vector<dtsp::Method> parse_methods(const std::string& s) {
  if (s == "both") return {dtsp::Method::MLE, dtsp::Method::MME};
  if (s == "mle") return {dtsp::Method::MLE};
  if (s == "mme") return {dtsp::Method::MME};
  throw Error(ErrorKind::InvalidConfig, "--method must be mle, mme or both");
}

void emit(const std::string& text, const std::string& output) {
  if (output.empty() || output == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(output, std::ios::binary);
  if (!out) throw Error(ErrorKind::InvalidConfig, "cannot open output '" + output + "'");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete two-sided power distribution toolkit"};
  app.require_subcommand(1);

  DistFlags dist;
  std::string format = "csv";
  std::string output;
  std::optional<std::uint64_t> seed;
  std::optional<long long> count;
  std::vector<std::size_t> sizes{25, 50, 100};
  long long replicates = 1000;
  std::string method = "both";
  std::string data_path = "-";
  bool auto_endpoints = false;
  unsigned threads = 0;
  bool timing = false;

  const auto common = [&](CLI::App* cmd, bool with_shape) {
    add_dist_flags(cmd, dist, with_shape);
    cmd->add_option("--format", format, "csv, json or markdown")
        ->check(CLI::IsMember({"csv", "json", "markdown"}));
    cmd->add_option("--output", output, "output file (default: standard output)");
  };

  auto* pmf_cmd = app.add_subcommand("pmf", "pmf, cdf, survival and hazard over the support");
  common(pmf_cmd, true);

  auto* moments_cmd = app.add_subcommand("moments", "moments, modes, median and parent bounds");
  common(moments_cmd, true);

  auto* sample_cmd = app.add_subcommand("sample", "draw variates by inverse-transform sampling");
  common(sample_cmd, true);
  sample_cmd->add_option("--count", count, "number of draws (>= 1)");
  sample_cmd->add_option("--seed", seed, "RNG seed (required)");

  auto* fit_cmd = app.add_subcommand("fit", "estimate n from data");
  common(fit_cmd, false);
  fit_cmd->add_option("--data", data_path, "data file, one integer per line ('-' = standard input)");
  fit_cmd->add_option("--method", method, "mle, mme or both");
  fit_cmd->add_flag("--auto-endpoints", auto_endpoints, "derive (a, m, b) from the data");

  auto* sim_cmd = app.add_subcommand("simulate", "Monte-Carlo study of the estimators");
  common(sim_cmd, true);
  sim_cmd->add_option("--seed", seed, "master seed (required)");
  sim_cmd->add_option("--sizes", sizes, "comma-separated sample sizes")->delimiter(',');
  sim_cmd->add_option("--replicates", replicates, "replicates per cell (>= 2)");
  sim_cmd->add_option("--method", method, "mle, mme or both");
  sim_cmd->add_option("--threads", threads, "worker threads (0 = all cores)");
  sim_cmd->add_flag("--timing", timing, "print runtime to standard error");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    const auto fmt = dtsp::parse_format(format);
    if (pmf_cmd->parsed()) {
      emit(render_pmf(require_params(dist), fmt), output);
    } else if (moments_cmd->parsed()) {
      emit(render_moments(require_params(dist), fmt), output);
    } else if (sample_cmd->parsed()) {
      const auto p = require_params(dist);
      if (!count || *count < 1) throw Error(ErrorKind::InvalidParameter, "--count must be >= 1");
      if (!seed) throw Error(ErrorKind::InvalidParameter, "--seed is required");
      dtsp::RngState rng(*seed);
      const auto s = dtsp::sample_many(p, static_cast<std::size_t>(*count), rng);
      std::string text;
      if (fmt == dtsp::ReportFormat::Json) {
        text = json(s.values).dump() + '\n';
      } else {
        for (auto y : s.values) text += std::to_string(y) + '\n';
      }
      emit(text, output);
    } else if (fit_cmd->parsed()) {
      const auto methods = parse_methods(method);
      if (!auto_endpoints) require_params(dist, false);
      std::vector<std::int64_t> data;
      if (data_path == "-") {
        data = dtsp::read_observations(std::cin);
      } else {
        std::ifstream in(data_path);
        if (!in) throw Error(ErrorKind::ParseError, "cannot read data file '" + data_path + "'");
        data = dtsp::read_observations(in);
      }
      dtsp::Endpoints ends;
      if (auto_endpoints) {
        ends = dtsp::endpoints_heuristic(data);
      } else {
        const auto p = require_params(dist, false);
        ends = {p.a, p.m, p.b};
      }
      std::vector<dtsp::EstimationResult> results;
      for (auto m : methods) results.push_back(dtsp::fit(m, data, ends.a, ends.m, ends.b));
      emit(render_fit(results, ends, auto_endpoints, fmt), output);
    } else if (sim_cmd->parsed()) {
      dtsp::StudyConfig cfg;
      cfg.params = require_params(dist);
      if (!seed) throw Error(ErrorKind::InvalidParameter, "--seed is required");
      if (replicates < 2) throw Error(ErrorKind::InvalidConfig, "--replicates must be >= 2");
      cfg.master_seed = *seed;
      cfg.sample_sizes = sizes;
      cfg.replicates = static_cast<std::size_t>(replicates);
      cfg.methods = parse_methods(method);
      const auto report = dtsp::run_study(cfg, threads);
      emit(dtsp::render_report(report, fmt), output);
      if (timing) std::cerr << "runtime_seconds " << report.runtime_seconds << '\n';
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
