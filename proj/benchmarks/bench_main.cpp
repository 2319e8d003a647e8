#include <benchmark/benchmark.h>

#include <fstream>
#include <random>
#include <sstream>

#include "pbcmdp/mdp.hpp"
#include "pbcmdp/parser.hpp"

using namespace pbcmdp;

namespace {

CompiledDescription load_domain(const std::string& name) {
  std::ifstream in(std::string(PBCMDP_DOMAINS_DIR) + "/" + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  ParseResult r = parse_description(ss.str());
  return CompiledDescription::compile(ground_schematics(*r.description));
}

Mdp random_mdp(int states, int actions, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Mdp mdp;
  mdp.num_states = states;
  mdp.num_actions = actions;
  mdp.T.assign(static_cast<std::size_t>(actions) * states * states, 0.0);
  mdp.R = mdp.T;
  for (int a = 0; a < actions; ++a) {
    for (int s = 0; s < states; ++s) {
      double total = 0.0;
      for (int s2 = 0; s2 < states; ++s2) {
        const double w = unit(rng);
        mdp.T[mdp.index(a, s, s2)] = w;
        total += w;
        mdp.R[mdp.index(a, s, s2)] = unit(rng) * 2.0 - 1.0;
      }
      for (int s2 = 0; s2 < states; ++s2) mdp.T[mdp.index(a, s, s2)] /= total;
    }
  }
  return mdp;
}

void BM_ParseGroundCompile(benchmark::State& state) {
  std::ifstream in(std::string(PBCMDP_DOMAINS_DIR) + "/blocks3.pbcp");
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  for (auto _ : state) {
    ParseResult r = parse_description(text);
    auto cd = CompiledDescription::compile(ground_schematics(*r.description));
    benchmark::DoNotOptimize(cd);
  }
}
BENCHMARK(BM_ParseGroundCompile);

void BM_StateEnumerationBlocks2(benchmark::State& state) {
  CompiledDescription cd = load_domain("blocks2.pbcp");
  for (auto _ : state) {
    TransitionAnalysis t(cd);
    benchmark::DoNotOptimize(t.states().size());
  }
}
BENCHMARK(BM_StateEnumerationBlocks2);

void BM_OneStepModelsBlocks3(benchmark::State& state) {
  CompiledDescription cd = load_domain("blocks3.pbcp");
  for (auto _ : state) {
    Inference inf(translate(cd, 1, TranslationParts::DynamicOnly));
    benchmark::DoNotOptimize(inf.models().size());
  }
}
BENCHMARK(BM_OneStepModelsBlocks3);

void BM_BuildMdpBlocks2(benchmark::State& state) {
  CompiledDescription cd = load_domain("blocks2.pbcp");
  for (auto _ : state) {
    TransitionAnalysis t(cd);
    Mdp mdp = build_mdp(t, /*unchecked=*/true);
    benchmark::DoNotOptimize(mdp.T.size());
  }
}
BENCHMARK(BM_BuildMdpBlocks2);

void BM_ValueIteration(benchmark::State& state) {
  const Mdp mdp = random_mdp(static_cast<int>(state.range(0)), 8, 7u);
  for (auto _ : state) {
    StationaryPolicy pi = solve_infinite(mdp, 0.95, 1e-6);
    benchmark::DoNotOptimize(pi.value[0]);
  }
}
BENCHMARK(BM_ValueIteration)->Arg(44)->Arg(128)->Arg(304);

void BM_BackwardInduction(benchmark::State& state) {
  const Mdp mdp = random_mdp(static_cast<int>(state.range(0)), 8, 11u);
  for (auto _ : state) {
    NonStationaryPolicy pi = solve_finite(mdp, 10);
    benchmark::DoNotOptimize(pi.value[0][0]);
  }
}
BENCHMARK(BM_BackwardInduction)->Arg(44)->Arg(304);

}  // namespace

BENCHMARK_MAIN();
