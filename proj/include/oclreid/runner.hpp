#ifndef OCLREID_RUNNER_HPP
#define OCLREID_RUNNER_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "oclreid/classifier.hpp"
#include "oclreid/core.hpp"
#include "oclreid/evalkit.hpp"
#include "oclreid/extractor.hpp"
#include "oclreid/lifecycle.hpp"
#include "oclreid/memory.hpp"
#include "oclreid/simstream.hpp"

namespace oclreid {

enum class Strategy { kFixed, kNaive, kReservoir, kMir };
enum class RunMode { kDeterministic, kConcurrent };

const char* to_string(Strategy s);
const char* to_string(RunMode m);
Strategy strategy_from_string(const std::string& name);
RunMode mode_from_string(const std::string& name);

struct Hyperparams {
    size_t short_memory = 64;  // |S|
    size_t long_memory = 512;  // |L|
    size_t b_lt = 64;          // long-term replay batch
    double lambda = 1.0;
    double delta_l = 0.02;
    double delta_sw = 0.35;
    double delta_reid = 0.7;
    int zeta_reid = 5;
    double lr = 0.01;
    double margin = 0.3;
    int d_raw = 32;
    int hidden = 128; // H
    int feat = 16;   // C
    int parts = 10;  // N

    void validate() const;
    ModelDims dims() const { return {d_raw, hidden, feat, parts}; }
};

struct RunConfig {
    ScenarioConfig scenario;
    Strategy strategy = Strategy::kReservoir;
    Hyperparams hp;
    RunMode mode = RunMode::kDeterministic;
    std::uint64_t seed = 1;
    std::string out_dir; // empty: keep artifacts in memory only
    bool dump_memory = false;

    // orchestration knobs
    long bootstrap_frames = 40;  // priming period with the designated target
    int warmup_persons = 4;
    long warmup_frames = 500;    // warmup_persons observations per frame
    long warmup_steps = 200;
    size_t warmup_batch = 64;
    int holdout_stride = 10;     // every k-th frame of a segment is held out
    size_t mir_candidates = 128;
    size_t queue_capacity = 8;   // concurrent mode observation queue
};

struct RunArtifacts {
    std::vector<std::string> event_log;
    std::vector<std::string> metrics_records;
    AccMatrix acc_matrix;
    ExtractorParams final_params;
    RidgeClassifier final_classifier;
    double success_rate_pct = 0.0;
    double r_meacc_pct = 0.0;
    std::vector<std::optional<BBox>> predictions; // per frame
    std::vector<BBox> gt_boxes;                   // per frame
    std::vector<FrameTruth> truths;               // per frame
    struct ReidEvent {
        long frame;
        int acquired_track;
        int gt_track;
    };
    std::vector<ReidEvent> reid_events;
    std::uint64_t warm_start_version = 0;
    std::uint64_t queue_dropped = 0;
    std::uint64_t torn_snapshots = 0;
    double wall_time_sec = 0.0;
};

RunArtifacts run(const RunConfig& config);

struct ComparisonRow {
    std::string strategy;
    double r_meacc_mean = 0.0, r_meacc_std = 0.0;
    double sr_mean = 0.0, sr_std = 0.0;
    int runs = 0;
};

struct ComparisonTable {
    std::string scenario;
    std::vector<ComparisonRow> rows;
    std::string render() const;
};

ComparisonTable compare(const std::vector<RunConfig>& configs);

// JSON config file round trip (schema documented in the README).
RunConfig load_run_config(const std::string& path);
std::string run_config_to_json(const RunConfig& config);

void write_artifacts(const RunConfig& config, const RunArtifacts& artifacts);

} // namespace oclreid

#endif
