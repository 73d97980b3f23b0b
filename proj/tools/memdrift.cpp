// memdrift: command-line driver for the graph-reconstruction benchmark.

#include "memdrift/memdrift.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace memdrift;

struct Overrides {
  std::string config;
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> count;
  std::optional<std::string> source;
  std::optional<std::string> cache;
  std::optional<std::string> model_name;
  std::optional<std::string> template_id;
  std::optional<std::string> aggregation;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-c,--config", o.config, "run config (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("-o,--output-dir", o.output_dir, "artifact directory");
  cmd->add_option("--seed", o.seed, "dispersion seed");
  cmd->add_option("--count", o.count, "test cases per sweep combination");
  cmd->add_option("--source", o.source, "model source")->check(CLI::IsMember({"live", "replay", "simulated"}));
  cmd->add_option("--cache", o.cache, "replay cache file");
  cmd->add_option("--model-name", o.model_name, "model name used in replay cache keys");
  cmd->add_option("--template", o.template_id, "prompt template")
      ->check(CLI::IsMember({"regular", "cot-basic", "cot-expanded"}));
  cmd->add_option("--aggregation", o.aggregation, "report aggregation")->check(CLI::IsMember({"macro", "micro"}));
}

RunConfig resolve(const Overrides& o) {
  std::ifstream in(o.config, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + o.config);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& ex) {
    throw ConfigError("config " + o.config + ": " + ex.what());
  }
  if (o.output_dir) doc["output_dir"] = *o.output_dir;
  if (o.seed) doc["dispersion"]["seed"] = *o.seed;
  if (o.count) doc["dispersion"]["count"] = *o.count;
  if (o.source) {
    doc["model"]["source"] = *o.source;
    // A drift profile only belongs to the simulated source.
    if (*o.source != "simulated") doc["model"].erase("drift");
  }
  if (o.model_name) doc["model"]["model_name"] = *o.model_name;
  if (o.cache) doc["model"]["cache"] = *o.cache;
  if (o.template_id) doc["template"] = *o.template_id;
  if (o.aggregation) doc["aggregation"] = *o.aggregation;
  return parse_run_config(doc);
}

void print(const StageOutput& out) {
  for (const auto& note : out.notes) std::cout << note << (note.empty() || note.back() != '\n' ? "\n" : "");
  for (const auto& f : out.files) std::cout << "wrote " << f.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"memdrift: long-context graph reconstruction benchmark"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  Overrides o;
  auto* validate = app.add_subcommand("validate", "check a run config and report every problem");
  auto* sample = app.add_subcommand("sample", "build the corpus (if synthetic) and the subgraph pool");
  auto* gen = app.add_subcommand("gen", "lay out and render the test suite");
  auto* run = app.add_subcommand("run", "collect model answers");
  auto* eval = app.add_subcommand("eval", "score answers against gold edges");
  auto* report = app.add_subcommand("report", "bin results by prompt length and emit csv, table and plot data");
  auto* all = app.add_subcommand("all", "sample, gen, run, eval and report in sequence");
  for (auto* cmd : {validate, sample, gen, run, eval, report, all}) add_common(cmd, o);

  SynthSpec synth;
  std::string synth_out;
  auto* synth_cmd = app.add_subcommand("synth", "write a synthetic corpus file");
  synth_cmd->add_option("--nodes", synth.node_count, "entity count");
  synth_cmd->add_option("-p,--edge-probability", synth.edge_probability, "independent edge probability");
  synth_cmd->add_option("--seed", synth.seed, "generator seed");
  synth_cmd->add_option("--min-tokens", synth.profile_token_budget.min_tokens, "profile length lower bound");
  synth_cmd->add_option("--max-tokens", synth.profile_token_budget.max_tokens, "profile length upper bound");
  synth_cmd->add_option("--out", synth_out, "output path")->required();

  std::string template_dir;
  auto* templates_cmd = app.add_subcommand("templates", "write the built-in prompt templates as JSON");
  templates_cmd->add_option("--out", template_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*synth_cmd) {
      synth.validate();
      Corpus corpus = generate_synthetic_corpus(synth);
      save_corpus(corpus, synth_out);
      std::cout << "wrote " << synth_out << " (" << corpus.graph().node_count() << " entities, "
                << corpus.graph().edge_count() << " edges)\n";
      return kExitOk;
    }
    if (*templates_cmd) {
      std::filesystem::create_directories(template_dir);
      for (auto id : {TemplateId::Regular, TemplateId::CotBasic, TemplateId::CotExpanded}) {
        auto path = std::filesystem::path(template_dir) / (to_string(id) + ".json");
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + path.string());
        out << nlohmann::json(builtin_template(id)).dump(2) << "\n";
        std::cout << "wrote " << path.string() << "\n";
      }
      return kExitOk;
    }

    const RunConfig cfg = resolve(o);
    if (*validate) {
      std::vector<std::string> problems;
      auto out = cmd_validate(cfg, problems);
      print(out);
      for (const auto& p : problems) std::cerr << "error: " << p << "\n";
      if (!problems.empty()) return kExitConfig;
      std::cout << "config OK\n";
      return kExitOk;
    }
    if (*sample) print(cmd_sample(cfg));
    if (*gen) print(cmd_gen(cfg));
    if (*run) print(cmd_run(cfg));
    if (*eval) print(cmd_eval(cfg));
    if (*report) print(cmd_report(cfg));
    if (*all) print(cmd_all(cfg));
    return kExitOk;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return exit_code_for(ex);
  }
}
