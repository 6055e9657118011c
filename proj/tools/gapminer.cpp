#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "gapminer/common.hpp"
#include "gapminer/corpus.hpp"
#include "gapminer/pipeline.hpp"
#include "gapminer/synth.hpp"

namespace {

using gapminer::pipeline::Stage;

struct Flags {
  std::string config, corpus, out, stage;
  std::uint64_t seed = 0;
  int max_dim = 0, min_persistence = 0, null_replicates = 0, threads = 0;
};

std::map<std::string, std::int64_t> parse_params(const std::vector<std::string>& items) {
  std::map<std::string, std::int64_t> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw gapminer::ConfigError("--param expects key=value, got '" + item + "'");
    try {
      std::size_t used = 0;
      const auto value = std::stoll(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1) throw std::invalid_argument(item);
      out[item.substr(0, eq)] = value;
    } catch (const std::logic_error&) {
      throw gapminer::ConfigError("--param value must be an integer: '" + item + "'");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gap-opening paper detection over temporal concept networks"};
  app.require_subcommand(1);
  app.fallthrough();

  Flags f;
  auto* o_config = app.add_option("--config", f.config, "JSON config file");
  auto* o_corpus = app.add_option("--corpus", f.corpus, "Corpus file (JSON lines)");
  auto* o_out = app.add_option("--out", f.out, "Output directory (synth: output corpus file)");
  auto* o_seed = app.add_option("--seed", f.seed, "Random seed");
  auto* o_max_dim = app.add_option("--max-dim", f.max_dim, "Highest simplex dimension in the filtration");
  auto* o_min_pers = app.add_option("--min-persistence", f.min_persistence, "Minimum persistence of a gap, in years");
  auto* o_null = app.add_option("--null-replicates", f.null_replicates, "Randomized corpora for the null model");
  auto* o_threads = app.add_option("--threads", f.threads, "Worker threads (default: GAPMINER_THREADS or all cores)");

  std::optional<Stage> only;
  for (auto stage : gapminer::pipeline::kStages) {
    const std::string name(gapminer::pipeline::to_string(stage));
    app.add_subcommand(name, "Run only the " + name + " stage")->callback([&only, stage] { only = stage; });
  }
  auto* run = app.add_subcommand("run", "Run every enabled stage");
  auto* o_stage = run->add_option("--stage", f.stage, "Run a single stage");

  std::string generator;
  std::vector<std::string> param_items;
  auto* synth = app.add_subcommand("synth", "Write a synthetic corpus");
  synth->add_option("generator", generator, "planted-cycle, planted-clique or random-pairs")->required();
  synth->add_option("--param", param_items, "Generator parameter key=value (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (synth->parsed()) {
      if (f.out.empty()) throw gapminer::ConfigError("synth needs --out FILE");
      const auto store = gapminer::synth::make_synthetic(generator, parse_params(param_items), f.seed);
      gapminer::write_corpus(std::filesystem::path(f.out), store);
      std::cout << "wrote " << store.size() << " papers to " << f.out << '\n';
      return 0;
    }

    gapminer::pipeline::PipelineConfig config;
    if (o_config->count()) config = gapminer::pipeline::load_config(f.config);
    if (o_corpus->count()) config.corpus_path = f.corpus;
    if (o_out->count()) config.output_dir = f.out;
    if (o_seed->count()) config.seed = f.seed;
    if (o_max_dim->count()) config.max_dim = f.max_dim;
    if (o_min_pers->count()) config.min_persistence = f.min_persistence;
    if (o_null->count()) config.null_replicates = f.null_replicates;
    if (o_threads->count()) config.threads = f.threads;
    if (o_stage->count()) {
      only = gapminer::pipeline::parse_stage(f.stage);
      if (!only) throw gapminer::ConfigError("unknown stage '" + f.stage + "'");
    }

    const auto result = gapminer::pipeline::run(config, only);
    for (const auto& s : result.stages)
      std::cout << gapminer::pipeline::to_string(s.stage) << (s.skipped ? " cached " : " ran ") << s.key.substr(0, 12)
                << '\n';
    std::cout << "manifest " << result.manifest_path.string() << '\n';
    return 0;
  } catch (const gapminer::Error& e) {
    std::cerr << "gapminer: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "gapminer: internal error: " << e.what() << '\n';
    return 4;
  }
}
