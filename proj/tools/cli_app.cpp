#include "cli_app.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "divpot/errors.hpp"
#include "divpot/market_data.hpp"
#include "divpot/matrix_stats.hpp"
#include "divpot/pca.hpp"
#include "divpot/rolling.hpp"
#include "divpot/selection.hpp"
#include "divpot/diversification.hpp"
#include "divpot/serialize.hpp"
#include "divpot/synth.hpp"

namespace divpot::cli {

namespace {

namespace fs = std::filesystem;

struct InputOptions {
  std::string prices_path;
  std::string dividends_path;
  std::string index_path;
  std::string synth_path;
  std::string start;
  std::string end;
};

struct RunConfig {
  InputOptions input;
  WindowConfig window;
  std::vector<std::string> measures;
  unsigned threads = 1;
  std::string output_path;
  std::string diagnostics_path;
};

struct InspectConfig {
  InputOptions input;
  WindowConfig window;
  long long window_number = -1;
  std::string out_dir;
};

void add_input_options(CLI::App& cmd, InputOptions& in) {
  auto* prices = cmd.add_option("--prices", in.prices_path, "CSV with header date,ticker,close");
  auto* dividends = cmd.add_option("--dividends", in.dividends_path, "CSV with header date,ticker,amount");
  auto* synth = cmd.add_option("--synth", in.synth_path, "Factor-model spec JSON used instead of price files");
  auto* start = cmd.add_option("--start", in.start, "First date of the complete-universe span (YYYY-MM-DD)");
  auto* end = cmd.add_option("--end", in.end, "Last date of the complete-universe span (YYYY-MM-DD)");
  cmd.add_option("--index", in.index_path, "Market index CSV with header date,value");
  synth->excludes(prices)->excludes(dividends)->excludes(start)->excludes(end);
  dividends->needs(prices);
}

void add_window_options(CLI::App& cmd, WindowConfig& w) {
  cmd.add_option("--window", w.length, "Return rows per window")->capture_default_str();
  cmd.add_option("--step", w.step, "Rows between window starts")->capture_default_str();
  cmd.add_option("--deletion", w.criteria.deletion_threshold, "Deletion criteria (eigenvalue)")->capture_default_str();
  cmd.add_option("--stop", w.criteria.stop_threshold, "Stop criteria (eigenvalue)")->capture_default_str();
  cmd.add_option("--min-retained", w.criteria.min_retained, "Smallest selection size")->capture_default_str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << content;
  out.flush();
  if (!out) throw IoError("write failed for '" + path + "'");
}

Date parse_date_option(const std::string& text, const char* option) {
  auto d = Date::parse(text);
  if (!d) throw ValidationError(std::string(option) + ": invalid date '" + text + "'");
  return *d;
}

synth::FactorSpec load_spec(const std::string& path) {
  const std::string text = read_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
  return synth::FactorSpec::from_json(j);
}

/// Returns from the chosen source. Price input is restricted to the complete
/// universe over [start, end] (whole span by default).
ReturnPanel load_returns(const InputOptions& in, std::ostream& err) {
  if (!in.synth_path.empty()) return synth::factor_model_returns(load_spec(in.synth_path));
  if (in.prices_path.empty()) throw ValidationError("one of --prices or --synth is required");

  const StockPanel raw = load_panel_files(in.prices_path, in.dividends_path);
  StockPanel panel = [&] {
    if (in.start.empty() && in.end.empty()) return complete_universe(raw);
    if (raw.num_dates() == 0) throw EmptyUniverseError("prices file has no rows");
    const Date start = in.start.empty() ? raw.dates().front() : parse_date_option(in.start, "--start");
    const Date end = in.end.empty() ? raw.dates().back() : parse_date_option(in.end, "--end");
    return complete_universe(raw, start, end);
  }();
  if (panel.num_tickers() != raw.num_tickers()) {
    err << "note: " << (raw.num_tickers() - panel.num_tickers()) << " of " << raw.num_tickers()
        << " tickers dropped for incomplete prices\n";
  }
  return simple_returns(panel);
}

std::optional<IndexSeries> load_optional_index(const InputOptions& in) {
  if (in.index_path.empty()) return std::nullopt;
  return load_index_file(in.index_path);
}

std::string default_diagnostics_path(const std::string& output) {
  fs::path p(output);
  fs::path name = p.stem();
  name += "_diagnostics";
  name += p.has_extension() ? p.extension() : fs::path(".csv");
  return (p.parent_path() / name).string();
}

int cmd_run(const RunConfig& cfg, std::ostream& err) {
  cfg.window.validate();
  RunOptions options;
  if (!cfg.measures.empty()) {
    options.measures = MeasureSet::none();
    for (const auto& m : cfg.measures) options.measures.add(MeasureSet::parse(m));
  }
  options.threads = cfg.threads == 0 ? 1 : cfg.threads;

  const ReturnPanel returns = load_returns(cfg.input, err);
  const auto index = load_optional_index(cfg.input);
  const MetricsSeries series = run_series(returns, cfg.window, index ? &*index : nullptr, options);

  std::ostringstream metrics;
  write_metrics_csv(metrics, series);
  std::ostringstream diagnostics;
  write_diagnostics_csv(diagnostics, series);
  write_file(cfg.output_path, metrics.str());
  write_file(cfg.diagnostics_path.empty() ? default_diagnostics_path(cfg.output_path) : cfg.diagnostics_path,
             diagnostics.str());
  return kOk;
}

int cmd_synth(const std::string& spec_path, const std::string& out_dir, double initial) {
  const auto spec = load_spec(spec_path);
  const StockPanel panel = synth::prices_from_returns(synth::factor_model_returns(spec), initial);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create directory '" + out_dir + "': " + ec.message());
  std::ostringstream prices;
  write_prices_csv(prices, panel);
  std::ostringstream dividends;
  write_dividends_csv(dividends, panel);
  write_file((fs::path(out_dir) / "prices.csv").string(), prices.str());
  write_file((fs::path(out_dir) / "dividends.csv").string(), dividends.str());
  return kOk;
}

/// Runs `compute` and renders its text, or the error message in its place.
template <class F>
std::string section_or_error(F&& compute) {
  try {
    return compute();
  } catch (const Error& e) {
    return std::string("error: ") + e.what() + "\n";
  }
}

int cmd_inspect(const InspectConfig& cfg, std::ostream& out, std::ostream& err) {
  cfg.window.validate();
  const ReturnPanel returns = load_returns(cfg.input, err);
  const auto schedule = window_schedule(returns.num_rows(), cfg.window);
  const std::size_t k =
      cfg.window_number < 0 ? schedule.size() - 1 : static_cast<std::size_t>(cfg.window_number);
  if (k >= schedule.size()) {
    throw ValidationError("--window-number " + std::to_string(k) + " is out of range; the schedule has " +
                          std::to_string(schedule.size()) + " windows");
  }
  const ReturnWindow window = make_window(returns, schedule[k].start, schedule[k].end - schedule[k].start);
  const auto index = load_optional_index(cfg.input);

  std::optional<CorrelationMatrix> corr;
  std::optional<Spectrum> spectrum;
  std::string corr_text = section_or_error([&] {
    corr = correlation_matrix(window);
    std::ostringstream s;
    write_matrix_csv(s, corr->tickers, corr->values);
    return s.str();
  });
  std::string cov_text = section_or_error([&] {
    const auto cov = covariance_matrix(window);
    std::ostringstream s;
    write_matrix_csv(s, cov.tickers, cov.values);
    return s.str();
  });
  std::string partial_text = "error: correlation matrix unavailable\n";
  std::string spectrum_text = partial_text;
  std::string selection_text = partial_text;
  if (corr) {
    partial_text = section_or_error([&] {
      const auto q = partial_correlations(*corr);
      std::ostringstream s;
      write_matrix_csv(s, q.tickers, q.values);
      return s.str();
    });
    spectrum_text = section_or_error([&] {
      spectrum = correlation_spectrum(*corr);
      std::ostringstream s;
      write_spectrum_csv(s, corr->tickers, *spectrum);
      return s.str();
    });
    selection_text = section_or_error([&] { return to_json(select_stocks(*corr, cfg.window.criteria)).dump(2) + "\n"; });
  }
  const MetricsRow row = run_window(window, cfg.window, index ? &*index : nullptr);
  MetricsSeries single;
  single.rows.push_back(row);
  std::ostringstream metrics;
  write_metrics_csv(metrics, single);
  std::ostringstream diagnostics;
  write_diagnostics_csv(diagnostics, single);

  if (!cfg.out_dir.empty()) {
    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    if (ec) throw IoError("cannot create directory '" + cfg.out_dir + "': " + ec.message());
    const fs::path dir(cfg.out_dir);
    write_file((dir / "correlation.csv").string(), corr_text);
    write_file((dir / "covariance.csv").string(), cov_text);
    write_file((dir / "partial_correlation.csv").string(), partial_text);
    write_file((dir / "spectrum.csv").string(), spectrum_text);
    write_file((dir / "selection.json").string(), selection_text);
    write_file((dir / "metrics.csv").string(), metrics.str());
    write_file((dir / "diagnostics.csv").string(), diagnostics.str());
    return kOk;
  }

  out << "# window " << k << ": rows [" << schedule[k].start << ", " << schedule[k].end << "), "
      << window.dates.front().to_string() << " to " << window.dates.back().to_string() << ", "
      << window.num_tickers() << " tickers\n";
  out << "# correlation\n" << corr_text;
  out << "# covariance\n" << cov_text;
  out << "# partial_correlation\n" << partial_text;
  out << "# spectrum\n" << spectrum_text;
  out << "# selection\n" << selection_text;
  out << "# metrics\n" << metrics.str();
  out << "# diagnostics\n" << diagnostics.str();
  return kOk;
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::validation:
      return kValidation;
    case ErrorKind::io:
      return kIo;
    case ErrorKind::numeric:
      return kNumeric;
  }
  return kValidation;
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rolling-window diversification-potential measures for equity return panels", "divpot"};
  app.require_subcommand(1);

  RunConfig run_cfg;
  auto* run_cmd = app.add_subcommand("run", "Compute KMO, PC1 %, selection count and diversification ratio per window");
  add_input_options(*run_cmd, run_cfg.input);
  add_window_options(*run_cmd, run_cfg.window);
  run_cmd->add_option("--measure", run_cfg.measures, "Restrict to these measures: kmo, pc1, select, dr")
      ->check(CLI::IsMember({"kmo", "pc1", "select", "dr"}));
  run_cmd->add_option("--threads", run_cfg.threads, "Worker threads for window evaluation")->capture_default_str();
  run_cmd->add_option("--output,-o", run_cfg.output_path, "Metrics CSV to write")->required();
  run_cmd->add_option("--diagnostics", run_cfg.diagnostics_path,
                      "Diagnostics CSV (default: <output>_diagnostics.csv next to the output)");

  std::string spec_path;
  std::string out_dir;
  double initial = 100.0;
  auto* synth_cmd = app.add_subcommand("synth", "Write prices.csv and dividends.csv for a factor-model spec");
  synth_cmd->add_option("--spec", spec_path, "Factor-model spec JSON")->required();
  synth_cmd->add_option("--out-dir", out_dir, "Directory for the generated CSV files")->required();
  synth_cmd->add_option("--initial-price", initial, "Starting price of every series")->capture_default_str();

  InspectConfig inspect_cfg;
  auto* inspect_cmd = app.add_subcommand("inspect", "Print one window's matrices, spectrum and selection");
  add_input_options(*inspect_cmd, inspect_cfg.input);
  add_window_options(*inspect_cmd, inspect_cfg.window);
  inspect_cmd->add_option("--window-number", inspect_cfg.window_number,
                          "0-based window in the schedule (default: last)");
  inspect_cmd->add_option("--out-dir", inspect_cfg.out_dir, "Write one file per section instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*run_cmd) return cmd_run(run_cfg, err);
    if (*synth_cmd) return cmd_synth(spec_path, out_dir, initial);
    if (*inspect_cmd) return cmd_inspect(inspect_cfg, out, err);
  } catch (const Error& e) {
    err << "divpot: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "divpot: " << e.what() << '\n';
    return kIo;
  }
  return kValidation;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.emplace_back("divpot");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace divpot::cli
