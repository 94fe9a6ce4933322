// mph: command-line front end for the multiphonic analysis toolkit.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "corpus.hpp"
#include "multiphonic/analysis.hpp"
#include "multiphonic/error.hpp"
#include "multiphonic/perception.hpp"
#include "multiphonic/synthesis.hpp"
#include "multiphonic/tracker.hpp"
#include "multiphonic/wav.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitConfig = 3;
constexpr int kExitInternal = 4;
constexpr const char* kConfigEnv = "MPH_CONFIG";

int exit_code_for(mph::ErrorCode code) {
  switch (code) {
    case mph::ErrorCode::Configuration: return kExitConfig;
    case mph::ErrorCode::Internal:      return kExitInternal;
    default:                            return kExitInput;
  }
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  std::replace(s.begin(), s.end(), '\r', ' ');
  return s;
}

int report_error(std::string_view code, const std::string& message, int exit_code) {
  std::cerr << "error[" << code << "]: " << one_line(message) << '\n';
  return exit_code;
}

json read_json_file(const fs::path& path, mph::ErrorCode on_parse) {
  std::ifstream in(path);
  if (!in) throw mph::Error(mph::ErrorCode::Io, "cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw mph::Error(on_parse, "'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw mph::Error(mph::ErrorCode::Io, "cannot open '" + path.string() + "'");
  return in;
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw mph::Error(mph::ErrorCode::Io, "cannot write '" + path.string() + "'");
  out << content;
}

void emit(const json& j, const std::string& out_path) {
  const auto text = j.dump(2) + "\n";
  if (out_path.empty() || out_path == "-") std::cout << text;
  else write_file(out_path, text);
}

// Defaults, then the env config file, then --config, then explicit flags.
struct ConfigFlags {
  std::string config_path;
  std::optional<std::size_t> window;
  std::optional<std::size_t> zero_pad;
  std::optional<std::size_t> frames;
  std::optional<std::string> shape;
  std::optional<double> phon;
  std::optional<double> smoothing;
  std::optional<double> f0_min;
  std::optional<double> f0_max;
  std::optional<double> offset;
  std::optional<double> voicing;
  bool no_weighting = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config override (default: $MPH_CONFIG)");
    cmd->add_option("--window", window, "analysis window length in samples (power of two)");
    cmd->add_option("--zero-pad", zero_pad, "zero-padding factor");
    cmd->add_option("--frames", frames, "number of averaged frames");
    cmd->add_option("--window-shape", shape, "hann | hamming | blackman | blackman-harris");
    cmd->add_option("--phon", phon, "equal-loudness contour level");
    cmd->add_flag("--no-weighting", no_weighting, "analyse the raw spectrum");
    cmd->add_option("--smoothing", smoothing, "spectral smoothing bandwidth in Hz");
    cmd->add_option("--f0-min", f0_min, "lower f0 search bound in Hz");
    cmd->add_option("--f0-max", f0_max, "upper f0 search bound in Hz");
    cmd->add_option("--offset", offset, "analysis frame offset in seconds");
    cmd->add_option("--voicing-threshold", voicing, "tracker confidence needed for a voiced frame");
  }

  mph::AnalysisConfig resolve() const {
    mph::AnalysisConfig c;
    if (const char* env = std::getenv(kConfigEnv); env && *env) {
      c = mph::config_from_json(read_json_file(env, mph::ErrorCode::Configuration), c);
    }
    if (!config_path.empty()) {
      c = mph::config_from_json(read_json_file(config_path, mph::ErrorCode::Configuration), c);
    }
    if (window) c.window.window_length = *window;
    if (zero_pad) c.window.zero_pad_factor = *zero_pad;
    if (frames) c.window.frames = *frames;
    if (shape) c.window.shape = mph::parse_window_shape(*shape);
    if (phon) c.phon = *phon;
    if (no_weighting) c.weighting = false;
    if (smoothing) c.smoothing_bandwidth_hz = *smoothing;
    if (f0_min) c.f0_search.min_hz = *f0_min;
    if (f0_max) c.f0_search.max_hz = *f0_max;
    if (offset) c.frame_offset_s = *offset;
    if (voicing) c.voicing_threshold = *voicing;
    c.validate();
    return c;
  }
};

json analyze_file(const fs::path& path, const mph::AnalysisConfig& config, const std::string& plots_dir) {
  const auto audio = mph::read_wav(path);
  mph::SampleInfo info{path.stem().string(), audio.rate, audio.samples.size(), audio.channels,
                       std::string(mph::sample_format_name(audio.format))};
  const auto result = mph::analyze_samples(audio.samples, info, config);
  if (!plots_dir.empty()) {
    const fs::path dir = fs::path(plots_dir) / info.id;
    write_file(dir / "spectrum_raw.csv", mph::spectrum_csv(result.raw));
    if (result.weighted) write_file(dir / "spectrum_weighted.csv", mph::spectrum_csv(*result.weighted));
    write_file(dir / "spectrum_smoothed.csv", mph::spectrum_csv(result.smoothed));
    write_file(dir / "spectrum.json", mph::spectrum_to_json(result.analysis_spectrum()).dump() + "\n");
    write_file(dir / "partials.csv", mph::partials_csv(result));
    write_file(dir / "spacing.csv", mph::spacing_csv(result));
    write_file(dir / "f0_markers.csv", mph::f0_markers_csv(result));
  }
  return mph::to_json(result);
}

int cmd_analyze(const std::vector<std::string>& files, const ConfigFlags& flags, const std::string& out,
                const std::string& out_dir, const std::string& plots_dir, unsigned jobs) {
  const auto config = flags.resolve();
  if (!out_dir.empty()) {
    std::set<std::string> stems;
    for (const auto& f : files) {
      if (!stems.insert(fs::path(f).stem().string()).second) {
        throw mph::Error(mph::ErrorCode::Configuration, "duplicate sample id '" + fs::path(f).stem().string() +
                                                            "' with --out-dir");
      }
    }
  }

  // Files run concurrently; results are collected in input order.
  std::vector<std::future<json>> pending;
  std::vector<json> reports;
  const unsigned width = std::max(1u, jobs);
  for (std::size_t i = 0; i < files.size(); ++i) {
    pending.push_back(std::async(std::launch::async, analyze_file, fs::path(files[i]), config, plots_dir));
    if (pending.size() >= width) {
      for (auto& f : pending) reports.push_back(f.get());
      pending.clear();
    }
  }
  for (auto& f : pending) reports.push_back(f.get());

  if (!out_dir.empty()) {
    for (std::size_t i = 0; i < files.size(); ++i) {
      write_file(fs::path(out_dir) / (fs::path(files[i]).stem().string() + ".json"), reports[i].dump(2) + "\n");
    }
  } else if (reports.size() == 1) {
    emit(reports.front(), out);
  } else {
    emit(json(reports), out);
  }
  return kExitOk;
}

int cmd_synth(const std::string& spec_path, const std::string& out_path, const std::string& format) {
  const auto spec = mph::tone_spec_from_json(read_json_file(spec_path, mph::ErrorCode::InvalidSpec));
  mph::SampleFormat fmt = mph::SampleFormat::Pcm16;
  if (format == "float32") fmt = mph::SampleFormat::Float32;
  else if (format == "pcm24") fmt = mph::SampleFormat::Pcm24;
  const auto samples = mph::render_tone(spec);
  if (fs::path(out_path).has_parent_path()) fs::create_directories(fs::path(out_path).parent_path());
  mph::write_wav(out_path, samples, spec.render.rate, fmt, mph::tone_spec_to_json(spec).dump());
  return kExitOk;
}

int cmd_perception(const std::string& reports_path, const std::string& analysis_path, const std::string& out,
                   const std::string& bars) {
  const auto stored = mph::stored_analysis_from_json(read_json_file(analysis_path, mph::ErrorCode::Format));
  auto in = open_input(reports_path);
  const auto reports = mph::load_reports(in);
  for (const auto& r : reports) {
    if (r.sample_id != stored.sample_id) {
      throw mph::Error(mph::ErrorCode::InvalidSpec, "sample id mismatch at row " + std::to_string(r.row) + ": '" +
                                                        r.sample_id + "' vs analysis '" + stored.sample_id + "'");
    }
  }
  if (!stored.fit && !reports.empty()) {
    throw mph::Error(mph::ErrorCode::DegenerateFit, "analysis report has no harmonic fit to associate against");
  }
  json j;
  j["schema_version"] = mph::kReportSchemaVersion;
  j["toolkit_version"] = mph::toolkit_version();
  mph::PerceptionAggregate agg;
  if (stored.fit) {
    agg = mph::aggregate_perception(reports, *stored.fit, stored.partials, stored.config.association);
  }
  agg.sample_id = stored.sample_id;
  j["aggregate"] = mph::to_json(agg);
  emit(j, out);
  if (!bars.empty()) write_file(bars, mph::perception_bar_csv(agg));
  return kExitOk;
}

int cmd_trackers(const std::vector<std::string>& traces, const std::string& analysis_path,
                 const std::string& reports_path, const ConfigFlags& flags, const std::string& out) {
  const auto stored = mph::stored_analysis_from_json(read_json_file(analysis_path, mph::ErrorCode::Format));
  auto config = stored.config;
  if (flags.voicing) config.voicing_threshold = *flags.voicing;
  config.validate();

  std::optional<mph::PerceptionAggregate> perception;
  if (!reports_path.empty()) {
    auto in = open_input(reports_path);
    std::vector<mph::ListenerReport> reports;
    for (auto& r : mph::load_reports(in)) {
      if (r.sample_id == stored.sample_id) reports.push_back(std::move(r));
    }
    if (stored.fit) perception = mph::aggregate_perception(reports, *stored.fit, stored.partials, config.association);
  }

  json trackers = json::array();
  for (const auto& spec : traces) {
    // name=path, or the file stem as the tracker name
    std::string name;
    std::string path = spec;
    if (const auto eq = spec.find('='); eq != std::string::npos && !fs::exists(spec)) {
      name = spec.substr(0, eq);
      path = spec.substr(eq + 1);
    } else {
      name = fs::path(spec).stem().string();
    }
    auto in = open_input(path);
    const auto trace = mph::load_tracker_trace(in, name, config.voicing_threshold);
    json t;
    t["name"] = name;
    t["frames"] = trace.frames.size();
    t["voiced_frames"] = trace.voiced_count();
    const auto dist = mph::aggregate_trace_distribution(trace, config.confidence_weighted, config.association.reference);
    if (!dist) {
      t["status"] = "no-data";
      t["distribution"] = nullptr;
      t["jumps"] = json::array();
      t["jump_count"] = 0;
      t["comparison"] = nullptr;
      trackers.push_back(t);
      continue;
    }
    t["status"] = "ok";
    t["distribution"] = mph::to_json(*dist);
    const auto jumps = mph::detect_octave_jumps(trace, config.jump_tolerance_cents, config.association.reference);
    json jj = json::array();
    for (const auto& e : jumps) jj.push_back(mph::to_json(e));
    t["jumps"] = jj;
    t["jump_count"] = jumps.size();
    if (stored.fit) {
      t["comparison"] = mph::to_json(mph::compare_distributions(*dist, perception ? &*perception : nullptr, *stored.fit,
                                                                stored.partials, config.association));
    } else {
      t["comparison"] = nullptr;
    }
    trackers.push_back(t);
  }

  json j;
  j["schema_version"] = mph::kReportSchemaVersion;
  j["toolkit_version"] = mph::toolkit_version();
  j["sample_id"] = stored.sample_id;
  j["voicing_threshold"] = config.voicing_threshold;
  j["trackers"] = trackers;
  emit(j, out);
  return kExitOk;
}

int cmd_fixtures(const std::string& dir) {
  for (const auto& p : mph::tools::write_corpus(dir)) std::cout << p.generic_string() << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pitch analysis toolkit for multiphonic tones"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(mph::toolkit_version()));

  ConfigFlags analyze_flags;
  std::vector<std::string> analyze_files;
  std::string analyze_out;
  std::string analyze_out_dir;
  std::string analyze_plots;
  unsigned analyze_jobs = std::max(1u, std::thread::hardware_concurrency());
  auto* analyze = app.add_subcommand("analyze", "Analyse WAV files and emit JSON reports");
  analyze->add_option("files", analyze_files, "WAV files")->required()->check(CLI::ExistingFile);
  analyze->add_option("-o,--out", analyze_out, "output file for the report (default stdout)");
  analyze->add_option("--out-dir", analyze_out_dir, "write <id>.json per input into this directory");
  analyze->add_option("--plots", analyze_plots, "write plot sidecar CSVs under <dir>/<id>/");
  analyze->add_option("-j,--jobs", analyze_jobs, "files analysed in parallel")->check(CLI::PositiveNumber);
  analyze_flags.attach(analyze);

  std::string synth_spec;
  std::string synth_out;
  std::string synth_format = "pcm16";
  auto* synth = app.add_subcommand("synth", "Render a tone spec to WAV");
  synth->add_option("spec", synth_spec, "tone spec JSON")->required()->check(CLI::ExistingFile);
  synth->add_option("out", synth_out, "output WAV")->required();
  synth->add_option("--format", synth_format, "pcm16 | pcm24 | float32")
      ->check(CLI::IsMember({"pcm16", "pcm24", "float32"}));

  std::string perc_reports;
  std::string perc_analysis;
  std::string perc_out;
  std::string perc_bars;
  auto* perception = app.add_subcommand("perception", "Aggregate listener reports against an analysis");
  perception->add_option("reports", perc_reports, "reports CSV")->required()->check(CLI::ExistingFile);
  perception->add_option("analysis", perc_analysis, "analysis report JSON")->required()->check(CLI::ExistingFile);
  perception->add_option("-o,--out", perc_out, "aggregate JSON (default stdout)");
  perception->add_option("--bars", perc_bars, "bar-graph CSV");

  ConfigFlags tracker_flags;
  std::vector<std::string> tracker_traces;
  std::string tracker_analysis;
  std::string tracker_reports;
  std::string tracker_out;
  auto* trackers = app.add_subcommand("trackers", "Compare pitch-tracker traces with an analysis");
  trackers->add_option("traces", tracker_traces, "trace CSVs, optionally name=path")->required();
  trackers->add_option("-a,--analysis", tracker_analysis, "analysis report JSON")->required()->check(CLI::ExistingFile);
  trackers->add_option("-r,--reports", tracker_reports, "listener reports CSV")->check(CLI::ExistingFile);
  trackers->add_option("-o,--out", tracker_out, "comparison JSON (default stdout)");
  trackers->add_option("--voicing-threshold", tracker_flags.voicing, "confidence needed for a voiced frame");

  std::string fixtures_dir = "fixtures";
  auto* fixtures = app.add_subcommand("fixtures", "Regenerate the fixture corpus");
  fixtures->add_option("dir", fixtures_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("usage", e.what(), kExitInput);
  }

  try {
    if (*analyze) {
      return cmd_analyze(analyze_files, analyze_flags, analyze_out, analyze_out_dir, analyze_plots, analyze_jobs);
    }
    if (*synth) return cmd_synth(synth_spec, synth_out, synth_format);
    if (*perception) return cmd_perception(perc_reports, perc_analysis, perc_out, perc_bars);
    if (*trackers) return cmd_trackers(tracker_traces, tracker_analysis, tracker_reports, tracker_flags, tracker_out);
    if (*fixtures) return cmd_fixtures(fixtures_dir);
  } catch (const mph::Error& e) {
    return report_error(mph::error_code_name(e.code()), e.what(), exit_code_for(e.code()));
  } catch (const fs::filesystem_error& e) {
    return report_error("io", e.what(), kExitInput);
  } catch (const std::exception& e) {
    return report_error("internal", e.what(), kExitInternal);
  }
  return kExitInternal;
}
