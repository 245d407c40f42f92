#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

namespace causalbounds {

// Exact table fixtures shipped with the artifact. Known names:
//   "pocb_table3"  observational (A,Y,W) marginal + U marginal (binary grid)
//   "mab_table4"   six arms: true means, causal intervals, eps = 0.1
//   "cb_contexts"  11 contexts x 5 arms: feature vectors and causal boxes
//   "negative_transfer_priors"  offline prior means for the warm-start study
nlohmann::json builtin_instance(const std::string& name);

// Experiment configs are JSON with a "kind" field in {bounds, eps_sweep, mab,
// cb, bench_sampler, negative_transfer, limiting}; environment payloads may be
// inline or "builtin:<name>". Writes the raw CSV at `out_path` and, for trial
// kinds, a summary CSV at <stem>_summary.csv. seed/threads fall back to the
// config fields when unset. Returns the number of result files written.
int run_experiment(const nlohmann::json& config, const std::string& out_path,
                   std::optional<std::uint64_t> seed_override, int threads);

// Recompute a summary from a raw per-trial results CSV (columns trial,
// algorithm, t, cumulative_regret): per algorithm the final-round regret
// mean, SD, median, min, max.
void write_report(const std::string& results_csv, const std::string& out_csv);

}  // namespace causalbounds
