#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "shieldup/cli/commands.hpp"
#include "shieldup/service/http.hpp"

using namespace shieldup;

namespace {

struct ServeOptions {
  int port = 8080;
  std::string host = "127.0.0.1";
  std::string corpus_dir = "corpus";
  std::string data_dir;
  std::string config;
};

int run_serve(const ServeOptions& o) {
  std::string data_dir = o.data_dir;
  if (data_dir.empty()) {
    const char* env = std::getenv("SHIELDUP_DATA_DIR");
    data_dir = env ? env : "data";
  }
  if (!std::filesystem::is_directory(o.corpus_dir)) {
    std::cerr << "error: corpus directory not found: " << o.corpus_dir << "\n";
    return cli::kConfigFailure;
  }
  try {
    service::ServiceConfig config;
    if (!o.config.empty()) config = service::service_config_from_json(nlohmann::json::parse(read_file(o.config)));
    if (config.researcher_token.empty()) {
      const char* env = std::getenv("SHIELDUP_RESEARCHER_TOKEN");
      config.researcher_token = env ? env : service::random_token();
      if (!env) std::cerr << "researcher token: " << config.researcher_token << "\n";
    }
    service::ServiceHost host(o.corpus_dir, data_dir, std::move(config));
    return host.run(o.host, o.port);
  } catch (const Error& e) {
    cli::print_error(std::cerr, e);
    return cli::kConfigFailure;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: InvalidConfig: " << e.what() << "\n";
    return cli::kConfigFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ShieldUp! trial toolkit: content validation, simulation, calibration, analysis and the HTTP service"};
  app.require_subcommand(1);

  cli::ValidateOptions validate;
  std::string corpus_dir;
  auto* v = app.add_subcommand("validate", "Parse and lint a scenario corpus");
  v->add_option("corpus-dir", corpus_dir, "Corpus directory")->required();
  v->add_flag("--json", validate.json, "Print the coverage report as JSON");

  cli::SimulateOptions simulate;
  std::string sim_config, sim_out, sim_export, sim_responses;
  std::uint64_t sim_seed = 0;
  int sim_n = 0;
  auto* s = app.add_subcommand("simulate", "Run a virtual trial and write its event log");
  s->add_option("--config", sim_config, "Cohort config JSON (defaults built in)");
  s->add_option("--out", sim_out, "Event log output (JSON lines)")->required();
  auto* seed_opt = s->add_option("--seed", sim_seed, "Override the config seed");
  auto* n_opt = s->add_option("--n", sim_n, "Override the cohort size");
  s->add_option("--export", sim_export, "Also write the analysis CSV");
  s->add_option("--responses", sim_responses, "Also write the item-level response CSV");

  cli::ExportOptions exp;
  std::string exp_log, exp_out;
  auto* e = app.add_subcommand("export", "Replay an event log into the analysis CSV");
  e->add_option("--log", exp_log, "Event log")->required();
  e->add_option("--out", exp_out, "CSV output")->required();

  std::string pilot_config, pilot_out;
  std::uint64_t pilot_seed = 0;
  int pilot_n = 0;
  auto* p = app.add_subcommand("pilot", "Simulate a calibration pilot of candidate SDAT items");
  p->add_option("--config", pilot_config, "Pilot config JSON (defaults: 23 items, n=360)");
  p->add_option("--out", pilot_out, "Response CSV output")->required();
  auto* pilot_seed_opt = p->add_option("--seed", pilot_seed, "Override the seed");
  auto* pilot_n_opt = p->add_option("--n", pilot_n, "Override the number of respondents");

  cli::CalibrateOptions calibrate;
  std::string cal_in, cal_out;
  auto* c = app.add_subcommand("calibrate", "Reliability, EFA, 2PL and item selection for a response CSV");
  c->add_option("--responses", cal_in, "Response CSV")->required();
  c->add_option("--out", cal_out, "Calibration report JSON")->required();
  c->add_option("--target", calibrate.target, "Number of items to select (even)");

  cli::AnalyzeOptions analyze;
  std::string an_in, an_plot, an_json;
  auto* a = app.add_subcommand("analyze", "ANCOVA of an analysis CSV");
  a->add_option("--input", an_in, "Analysis CSV")->required();
  a->add_option("--outcome", analyze.outcome, "scam or notscam")->check(CLI::IsMember({"scam", "notscam"}));
  a->add_option("--phase", analyze.phase, "post or followup")->check(CLI::IsMember({"post", "followup"}));
  a->add_option("--plot", an_plot, "Write a means +/- SE chart (SVG)");
  a->add_option("--json-out", an_json, "Also write the JSON report to a file");

  ServeOptions serve;
  auto* sv = app.add_subcommand("serve", "Run the HTTP service");
  sv->add_option("--port", serve.port, "Port");
  sv->add_option("--host", serve.host, "Bind address");
  sv->add_option("--corpus-dir", serve.corpus_dir, "Corpus directory");
  sv->add_option("--data-dir", serve.data_dir, "Data directory (default $SHIELDUP_DATA_DIR or ./data)");
  sv->add_option("--config", serve.config, "Service config JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int rc = app.exit(err);
    return rc == 0 ? 0 : cli::kConfigFailure;
  }

  if (v->parsed()) {
    validate.corpus_dir = corpus_dir;
    return cli::run_validate(validate, std::cout, std::cerr);
  }
  if (s->parsed()) {
    if (!sim_config.empty()) simulate.config = sim_config;
    simulate.out = sim_out;
    if (seed_opt->count()) simulate.seed = sim_seed;
    if (n_opt->count()) simulate.n = sim_n;
    if (!sim_export.empty()) simulate.export_csv = sim_export;
    if (!sim_responses.empty()) simulate.responses_csv = sim_responses;
    return cli::run_simulate(simulate, std::cout, std::cerr);
  }
  if (e->parsed()) {
    exp.log = exp_log;
    exp.out = exp_out;
    return cli::run_export(exp, std::cout, std::cerr);
  }
  if (p->parsed()) {
    cli::PilotOptions pilot;
    if (!pilot_config.empty()) pilot.config = pilot_config;
    pilot.out = pilot_out;
    if (pilot_seed_opt->count()) pilot.seed = pilot_seed;
    if (pilot_n_opt->count()) pilot.n = pilot_n;
    return cli::run_pilot(pilot, std::cout, std::cerr);
  }
  if (c->parsed()) {
    calibrate.responses = cal_in;
    calibrate.out = cal_out;
    return cli::run_calibrate(calibrate, std::cout, std::cerr);
  }
  if (a->parsed()) {
    analyze.input = an_in;
    if (!an_plot.empty()) analyze.plot = an_plot;
    if (!an_json.empty()) analyze.json_out = an_json;
    return cli::run_analyze(analyze, std::cout, std::cerr);
  }
  if (sv->parsed()) return run_serve(serve);
  return cli::kConfigFailure;
}
