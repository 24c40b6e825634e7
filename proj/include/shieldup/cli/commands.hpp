#pragma once

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "shieldup/analysis/report.hpp"
#include "shieldup/content/corpus.hpp"
#include "shieldup/content/coverage.hpp"
#include "shieldup/content/vuj.hpp"
#include "shieldup/engine/session.hpp"
#include "shieldup/psychometrics/calibration.hpp"
#include "shieldup/simulation/pilot.hpp"
#include "shieldup/simulation/virtual_trial.hpp"

namespace shieldup::cli {

namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kContentFailure = 1, kConfigFailure = 2, kAnalysisFailure = 3 };

inline int exit_code_for(Errc code) {
  switch (code) {
    case Errc::Syntax:
    case Errc::Schema:
    case Errc::Graph:
      return kContentFailure;
    case Errc::InvalidConfig:
    case Errc::Io:
    case Errc::CorruptLog:
      return kConfigFailure;
    default:
      return kAnalysisFailure;
  }
}

inline void print_error(std::ostream& err, const Error& e) { err << "error: " << e.what() << "\n"; }

struct ValidateOptions {
  fs::path corpus_dir;
  bool json = false;
};

// Exit 0 iff every file parses, the corpus is non-empty and coverage is full.
inline int run_validate(const ValidateOptions& o, std::ostream& out, std::ostream& err) {
  Corpus corpus;
  try {
    corpus = load_corpus(o.corpus_dir);
  } catch (const Error& e) {
    print_error(err, e);
    return kContentFailure;
  }
  bool ok = corpus.failures.empty();
  for (const auto& f : corpus.failures) err << f.file << ": " << f.message << "\n";
  auto check_file = [&](const fs::path& path, auto&& parse) {
    if (!fs::exists(path)) return;
    try {
      parse(read_file(path));
    } catch (const Error& e) {
      err << path.filename().string() << ": " << e.what() << "\n";
      ok = false;
    }
  };
  std::size_t sdat_items = 0, vuj_records = 0;
  check_file(o.corpus_dir / "sdat" / "items.json", [&](const std::string& text) {
    const auto items = parse_sdat_items(text);
    validate_parallel_forms(assemble_form(items, Form::A), assemble_form(items, Form::B));
    sdat_items = items.size();
  });
  check_file(o.corpus_dir / "vuj" / "stories.jsonl",
             [&](const std::string& text) { vuj_records = parse_vuj_lines(text).size(); });
  if (corpus.scenarios.empty()) {
    err << o.corpus_dir.string() << ": no scenarios found\n";
    ok = false;
  }
  const CoverageReport report = lint_corpus(corpus.scenarios);
  if (!report.clean()) ok = false;
  nlohmann::json doc = report.to_json();
  doc["files_failed"] = corpus.failures.size();
  doc["sdat_items"] = sdat_items;
  doc["vuj_records"] = vuj_records;
  if (o.json) {
    out << doc.dump(2) << "\n";
  } else {
    out << "scenarios: " << report.scenario_count << "\n"
        << "tactics covered: " << report.tactics_covered() << "/" << all_values<Tactic>().size() << "\n"
        << "levels covered: " << report.levels_covered() << "/" << kMaxLevel << "\n";
    for (Tactic t : report.uncovered_tactics) out << "uncovered tactic: " << name_of(t) << "\n";
    for (int l : report.empty_levels) out << "empty level: " << l << "\n";
    if (sdat_items) out << "sdat items: " << sdat_items << "\n";
    if (vuj_records) out << "vuj records: " << vuj_records << "\n";
    out << (ok ? "ok" : "FAILED") << "\n";
  }
  return ok ? kOk : kContentFailure;
}

struct SimulateOptions {
  std::optional<fs::path> config;
  fs::path out;
  std::optional<std::uint64_t> seed;
  std::optional<int> n;
  std::optional<fs::path> export_csv;
  std::optional<fs::path> responses_csv;
};

inline int run_simulate(const SimulateOptions& o, std::ostream& out, std::ostream& err) {
  sim::CohortConfig cfg;
  try {
    cfg = o.config ? sim::parse_cohort_config(read_file(*o.config)) : sim::default_cohort_config();
    if (o.seed) cfg.seed = *o.seed;
    if (o.n) cfg.n = *o.n;
    cfg.validate();
  } catch (const Error& e) {
    print_error(err, e);
    return kConfigFailure;
  }
  try {
    const sim::VirtualTrial t = sim::run_virtual_trial(cfg);
    write_file(o.out, t.log.to_jsonl());
    if (o.export_csv) write_file(*o.export_csv, export_dataset(t.log));
    if (o.responses_csv) write_file(*o.responses_csv, write_response_csv(t.responses));
    out << "participants: " << cfg.n << "\nevents: " << t.log.size() << "\nlog: " << o.out.string() << "\n";
  } catch (const Error& e) {
    print_error(err, e);
    return exit_code_for(e.code());
  }
  return kOk;
}

struct ExportOptions {
  fs::path log;
  fs::path out;
};

inline int run_export(const ExportOptions& o, std::ostream& out, std::ostream& err) {
  try {
    const EventLog log = EventLog::parse_jsonl(read_file(o.log));
    write_file(o.out, export_dataset(log));
    out << "rows written to " << o.out.string() << "\n";
  } catch (const Error& e) {
    print_error(err, e);
    return kConfigFailure;
  }
  return kOk;
}

struct PilotOptions {
  std::optional<fs::path> config;
  fs::path out;
  std::optional<std::uint64_t> seed;
  std::optional<int> n;
};

inline int run_pilot(const PilotOptions& o, std::ostream& out, std::ostream& err) {
  try {
    sim::PilotConfig cfg = o.config ? sim::pilot_config_from_json(nlohmann::json::parse(read_file(*o.config)))
                                    : sim::default_pilot_config();
    if (o.seed) cfg.seed = *o.seed;
    if (o.n) cfg.n = *o.n;
    const auto records = sim::generate_pilot(cfg);
    write_file(o.out, write_response_csv(records));
    out << "respondents: " << cfg.n << "\nitems: " << cfg.items.size() << "\n";
  } catch (const Error& e) {
    print_error(err, e);
    return kConfigFailure;
  } catch (const nlohmann::json::exception& e) {
    err << "error: InvalidConfig: " << e.what() << "\n";
    return kConfigFailure;
  }
  return kOk;
}

struct CalibrateOptions {
  fs::path responses;
  fs::path out;
  int target = kSdatItems;
};

inline int run_calibrate(const CalibrateOptions& o, std::ostream& out, std::ostream& err) {
  std::vector<ResponseRecord> records;
  try {
    records = parse_response_csv(read_file(o.responses));
  } catch (const Error& e) {
    print_error(err, e);
    return e.code() == Errc::Io ? kConfigFailure : kContentFailure;
  }
  try {
    const CalibrationReport report = calibrate(records, o.target);
    write_file(o.out, to_json(report).dump(2) + "\n");
    out << "respondents: " << report.respondents << "\nalpha (pool): " << format_fixed(report.pool.alpha)
        << "\nselected:";
    for (const auto& id : report.selection.selected) out << " " << id;
    out << "\nalpha (selected): " << format_fixed(report.selected_alpha) << "\n";
  } catch (const Error& e) {
    print_error(err, e);
    return kAnalysisFailure;
  }
  return kOk;
}

struct AnalyzeOptions {
  fs::path input;
  std::string outcome = "scam";
  std::string phase = "post";
  std::optional<fs::path> plot;
  std::optional<fs::path> json_out;
};

// The JSON document on stdout is the same one POST /analyze returns.
inline int run_analyze(const AnalyzeOptions& o, std::ostream& out, std::ostream& err) {
  const auto outcome = parse_outcome(o.outcome);
  const auto phase = parse_analysis_phase(o.phase);
  if (!outcome || !phase) {
    err << "error: --outcome must be scam|notscam and --phase post|followup\n";
    return kConfigFailure;
  }
  std::vector<ExportRow> rows;
  try {
    rows = parse_export_csv(read_file(o.input));
  } catch (const Error& e) {
    print_error(err, e);
    return e.code() == Errc::Io ? kConfigFailure : kAnalysisFailure;
  }
  try {
    const nlohmann::json report = analysis_report(rows, *outcome, *phase);
    out << report.dump(2) << "\n";
    err << summary_table(report);
    if (o.json_out) write_file(*o.json_out, report.dump());
    if (o.plot) write_file(*o.plot, means_svg(report));
  } catch (const Error& e) {
    print_error(err, e);
    return kAnalysisFailure;
  }
  return kOk;
}

}  // namespace shieldup::cli
