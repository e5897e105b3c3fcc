#include "oclreid/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "oclreid/errors.hpp"
#include "oclreid/rng.hpp"

namespace oclreid {

const char* to_string(Strategy s) {
    switch (s) {
        case Strategy::kFixed: return "fixed";
        case Strategy::kNaive: return "naive";
        case Strategy::kReservoir: return "reservoir";
        case Strategy::kMir: return "mir";
    }
    return "?";
}

const char* to_string(RunMode m) {
    return m == RunMode::kDeterministic ? "deterministic" : "concurrent";
}

Strategy strategy_from_string(const std::string& name) {
    if (name == "fixed") return Strategy::kFixed;
    if (name == "naive") return Strategy::kNaive;
    if (name == "reservoir") return Strategy::kReservoir;
    if (name == "mir") return Strategy::kMir;
    throw ConfigError("unknown strategy: " + name);
}

RunMode mode_from_string(const std::string& name) {
    if (name == "deterministic" || name == "deterministic-single-thread")
        return RunMode::kDeterministic;
    if (name == "concurrent") return RunMode::kConcurrent;
    throw ConfigError("unknown mode: " + name);
}

void Hyperparams::validate() const {
    if (short_memory == 0 || long_memory == 0 || b_lt == 0)
        throw ConfigError("memory sizes must be positive");
    if (lambda <= 0.0 || delta_l <= 0.0 || delta_sw <= 0.0 ||
        delta_reid <= 0.0 || margin <= 0.0)
        throw ConfigError("thresholds must be positive");
    if (zeta_reid < 1) throw ConfigError("zeta_reid must be >= 1");
    if (lr < 0.0) throw ConfigError("learning rate must be non-negative");
    if (d_raw < 1 || hidden < 1 || feat < 1 || parts != PartScheme::kNumParts)
        throw ConfigError("bad model dimensions");
}

namespace {

// Whole-model snapshot published by the learner.  The version is stamped at
// the head and tail so readers can assert the snapshot was swapped whole.
struct PublishedModel {
    std::uint64_t version_head = 0;
    ExtractorParams params;
    RidgeClassifier clf;
    std::uint64_t version_tail = 0;
};

class SnapshotSlot {
public:
    void publish(std::shared_ptr<const PublishedModel> model) {
        std::lock_guard<std::mutex> lock(mu_);
        model_ = std::move(model);
    }
    std::shared_ptr<const PublishedModel> read() const {
        std::lock_guard<std::mutex> lock(mu_);
        return model_;
    }

private:
    mutable std::mutex mu_;
    std::shared_ptr<const PublishedModel> model_;
};

struct LearnerTask {
    TrainRequests requests;
    bool stop = false;
};

// Bounded handoff from the inference thread to the learner; overflow drops
// the oldest queued task and counts it.
class TaskQueue {
public:
    explicit TaskQueue(size_t capacity) : capacity_(capacity) {}

    void push(LearnerTask task) {
        std::lock_guard<std::mutex> lock(mu_);
        if (queue_.size() >= capacity_ && !task.stop) {
            queue_.pop_front();
            ++dropped_;
        }
        queue_.push_back(std::move(task));
        cv_.notify_one();
    }

    LearnerTask pop() {
        std::unique_lock<std::mutex> lock(mu_);
        cv_.wait(lock, [&] { return !queue_.empty(); });
        LearnerTask task = std::move(queue_.front());
        queue_.pop_front();
        return task;
    }

    std::uint64_t dropped() const {
        std::lock_guard<std::mutex> lock(mu_);
        return dropped_;
    }

private:
    size_t capacity_;
    mutable std::mutex mu_;
    std::condition_variable cv_;
    std::deque<LearnerTask> queue_;
    std::uint64_t dropped_ = 0;
};

struct HandleOutcome {
    bool stepped = false;
    bool skipped = false;
};

// Owns the mutable training state: buffers, keyframe bookkeeping, the latest
// extractor parameters and the classifier.
class LearnerCore {
public:
    LearnerCore(const RunConfig& cfg, ExtractorParams warm_start)
        : cfg_(cfg),
          st_(cfg.hp.short_memory),
          lt_(cfg.hp.long_memory,
              cfg.strategy == Strategy::kMir ? ConsolidationPolicy::kMir
                                             : ConsolidationPolicy::kReservoir,
              cfg.hp.long_memory / 4),
          params_(std::move(warm_start)),
          mem_rng_(derive_seed(cfg.seed, "memory")),
          replay_rng_(derive_seed(cfg.seed, "replay")) {
        kf_.snapshot = params_;
        kf_.delta_threshold = cfg.hp.delta_l;
        clf_.W = Eigen::MatrixXd::Zero(cfg.hp.parts, cfg.hp.feat);
        clf_.lambda = cfg.hp.lambda;
    }

    HandleOutcome handle(const TrainRequests& req) {
        HandleOutcome outcome;
        if (!req.any()) return outcome;
        for (const auto& obs : req.short_term) st_.push(obs);
        if (req.refit_classifier) refit();
        const bool uses_long_term = cfg_.strategy == Strategy::kReservoir ||
                                    cfg_.strategy == Strategy::kMir;
        if (uses_long_term) {
            for (const auto& obs : req.long_term_negatives)
                lt_.offer(obs, mem_rng_);
            if (req.keyframe_candidate.has_value())
                consider_keyframe(*req.keyframe_candidate);
        }
        if (req.learner_step && cfg_.strategy != Strategy::kFixed)
            outcome = learner_step(req);
        return outcome;
    }

    std::shared_ptr<const PublishedModel> make_snapshot() const {
        auto model = std::make_shared<PublishedModel>();
        model->version_head = params_.version;
        model->params = params_;
        model->clf = clf_;
        model->version_tail = params_.version;
        return model;
    }

    const ExtractorParams& params() const { return params_; }
    const RidgeClassifier& classifier() const { return clf_; }
    const ShortTermMemory& short_term() const { return st_; }
    const LongTermMemory& long_term() const { return lt_; }

private:
    void refit() {
        if (st_.empty()) return;
        DesignBlock block;
        for (const auto& obs : st_.buffer())
            block.add_sample(forward(params_, obs), obs.label);
        RidgeClassifier fresh = fit(block, cfg_.hp.lambda);
        // the recent window usually covers a single orientation; keep the
        // last trained weights for parts with no rows so the other half
        // stays scorable instead of going confidence-unavailable
        for (size_t i = 0; i < fresh.trained_mask.size(); ++i) {
            if (!fresh.trained_mask[i] && clf_.trained_mask[i]) {
                fresh.W.row(static_cast<Eigen::Index>(i)) =
                    clf_.W.row(static_cast<Eigen::Index>(i));
                fresh.trained_mask[i] = 1;
            }
        }
        clf_ = fresh;
    }

    TrainBatch short_term_batch() const {
        TrainBatch batch;
        for (const auto& obs : st_.buffer())
            batch.add(obs, Provenance::kShortTerm);
        return batch;
    }

    void consider_keyframe(const Observation& target) {
        if (!kf_.initialized) {
            // nothing to compare against yet: archive unconditionally
            lt_.offer(target, mem_rng_);
            pending_refresh_ = true;
            return;
        }
        try {
            KeyframeDecision kd = keyframe_decision(kf_, target,
                                                    short_term_batch(),
                                                    cfg_.hp.margin);
            if (kd.accept) {
                lt_.offer(target, mem_rng_);
                pending_refresh_ = true;
            }
        } catch (const KeyframeUndecidableError&) {
            // no negative context this period; skip insertion
        }
    }

    HandleOutcome learner_step(const TrainRequests& req) {
        HandleOutcome outcome;
        TrainBatch batch;
        try {
            switch (cfg_.strategy) {
                case Strategy::kNaive: {
                    for (const auto& obs : req.short_term)
                        batch.add(obs, Provenance::kShortTerm);
                    break;
                }
                case Strategy::kReservoir: {
                    batch = sample_replay(st_, lt_, cfg_.hp.b_lt, replay_rng_);
                    break;
                }
                case Strategy::kMir: {
                    batch = mir_batch(req);
                    break;
                }
                default:
                    return outcome;
            }
            auto [next, report] =
                sgd_step(params_, batch, cfg_.hp.lr, cfg_.hp.margin);
            if (pending_refresh_) {
                kf_.snapshot = params_; // extractor the step started from
                kf_.loss_ref = report.total;
                kf_.initialized = true;
                pending_refresh_ = false;
            }
            params_ = std::move(next);
            outcome.stepped = true;
        } catch (const MiningImpossibleError&) {
            outcome.skipped = true;
        } catch (const ReplayUnavailableError&) {
            outcome.skipped = true;
        }
        return outcome;
    }

    TrainBatch mir_batch(const TrainRequests& req) {
        TrainBatch incoming;
        for (const auto& obs : req.short_term)
            incoming.add(obs, Provenance::kShortTerm);
        const size_t want = std::min(cfg_.hp.b_lt, lt_.buffer().size());
        if (want > 0) {
            try {
                std::vector<Observation> retrieved = mir_retrieve(
                    lt_, params_, incoming,
                    std::max(cfg_.mir_candidates, cfg_.hp.b_lt), cfg_.hp.b_lt,
                    cfg_.hp.lr, replay_rng_, cfg_.hp.margin);
                TrainBatch batch = short_term_batch();
                for (auto& obs : retrieved)
                    batch.add(std::move(obs), Provenance::kLongTerm);
                return batch;
            } catch (const MiningImpossibleError&) {
                // incoming frame not trainable on its own; plain replay
            }
        }
        return sample_replay(st_, lt_, cfg_.hp.b_lt, replay_rng_);
    }

    const RunConfig& cfg_;
    ShortTermMemory st_;
    LongTermMemory lt_;
    KeyframeState kf_;
    bool pending_refresh_ = false;
    ExtractorParams params_;
    RidgeClassifier clf_;
    Rng mem_rng_;
    Rng replay_rng_;
};

ExtractorParams train_warm_start(const RunConfig& cfg) {
    Rng init_rng(derive_seed(cfg.scenario.seed, "warmup-init"));
    ExtractorParams params =
        ExtractorParams::random_init(cfg.hp.dims(), init_rng, 0.1);
    if (cfg.warmup_frames <= 0 || cfg.warmup_steps <= 0) return params;
    const std::vector<Observation> pool =
        warmup_population(cfg.scenario, cfg.warmup_persons, cfg.warmup_frames);
    Rng batch_rng(derive_seed(cfg.scenario.seed, "warmup-batch"));
    for (long step = 0; step < cfg.warmup_steps; ++step) {
        TrainBatch batch;
        int pos = 0, neg = 0;
        for (size_t i = 0; i < cfg.warmup_batch; ++i) {
            const auto& obs = pool[static_cast<size_t>(batch_rng.below(pool.size()))];
            (obs.label == 1 ? pos : neg)++;
            batch.add(obs, Provenance::kShortTerm);
        }
        if (pos == 0 || neg == 0) continue; // not mineable; rare
        params = sgd_step(params, batch, cfg.hp.lr, cfg.hp.margin).first;
    }
    return params;
}

TrainRequests build_bootstrap_requests(const std::vector<Observation>& frame_obs,
                                       int gt_track) {
    TrainRequests req;
    for (Observation obs : frame_obs) {
        if (!obs.vis.any()) continue;
        obs.label = (obs.track_id == gt_track) ? 1 : 0;
        if (obs.label == 0) req.long_term_negatives.push_back(obs);
        if (obs.label == 1) req.keyframe_candidate = obs;
        req.short_term.push_back(std::move(obs));
    }
    req.refit_classifier = true;
    req.learner_step = true;
    return req;
}

} // namespace

RunArtifacts run(const RunConfig& config_in) {
    RunConfig cfg = config_in;
    cfg.hp.validate();
    cfg.scenario.d_raw = cfg.hp.d_raw;
    cfg.scenario.seed = derive_seed(cfg.seed, "scenario");
    cfg.scenario.validate();

    const auto t0 = std::chrono::steady_clock::now();
    RunArtifacts artifacts;

    ExtractorParams warm_start = train_warm_start(cfg);
    artifacts.warm_start_version = warm_start.version;

    LearnerCore learner(cfg, warm_start);
    SnapshotSlot slot;
    slot.publish(learner.make_snapshot());

    const bool concurrent = cfg.mode == RunMode::kConcurrent;
    TaskQueue queue(cfg.queue_capacity);
    std::thread learner_thread;
    if (concurrent) {
        learner_thread = std::thread([&] {
            for (;;) {
                LearnerTask task = queue.pop();
                if (task.stop) break;
                learner.handle(task.requests);
                slot.publish(learner.make_snapshot());
            }
        });
    }

    auto submit = [&](TrainRequests req) {
        if (concurrent) {
            queue.push({std::move(req), false});
        } else {
            learner.handle(req);
            slot.publish(learner.make_snapshot());
        }
    };

    auto read_model = [&]() {
        std::shared_ptr<const PublishedModel> model = slot.read();
        if (model->version_head != model->version_tail)
            ++artifacts.torn_snapshots;
        return model;
    };

    LifecycleThresholds thresholds{cfg.hp.delta_sw, cfg.hp.delta_reid,
                                   cfg.hp.zeta_reid};
    LifecycleState life = LifecycleState::following(0, thresholds);

    SegmentEvalSet eval_sets;
    StreamGenerator gen(cfg.scenario);
    int current_segment = 0;
    long frames_in_segment = 0;

    auto eval_row = [&](int row) {
        auto model = read_model();
        for (int j = 0; j <= row; ++j) {
            const auto& set = eval_sets.segments[static_cast<size_t>(j)];
            artifacts.acc_matrix.a[static_cast<size_t>(row)][static_cast<size_t>(j)] =
                segment_accuracy(model->clf, model->params, set).accuracy;
        }
    };

    while (auto frame = gen.next()) {
        const long f = frame->truth.frame;
        if (frame->truth.segment_index > current_segment) {
            eval_row(current_segment);
            current_segment = frame->truth.segment_index;
            frames_in_segment = 0;
        }
        const bool held_out = (frames_in_segment % cfg.holdout_stride) == 0;
        ++frames_in_segment;
        if (held_out) {
            // ground-truth-labeled copy for honest accuracy measurement
            for (Observation obs : frame->observations) {
                obs.label = (obs.track_id == frame->truth.gt_target_track_id) ? 1 : 0;
                eval_sets.segments[static_cast<size_t>(frame->truth.segment_index)]
                    .push_back(std::move(obs));
            }
        }

        auto model = read_model();
        ConfidenceFn conf_fn = [&](const Observation& obs)
            -> std::optional<double> {
            try {
                return confidence(model->clf, forward(model->params, obs));
            } catch (const ConfidenceUnavailableError&) {
                return std::nullopt;
            }
        };

        FrameDecision decision;
        TrainRequests requests;
        if (f < cfg.bootstrap_frames) {
            // priming period: the operator-designated target is trusted
            const int gt = frame->truth.gt_target_track_id;
            life = LifecycleState::following(gt, thresholds);
            if (frame->truth.target_present) {
                for (const auto& obs : frame->observations)
                    if (obs.track_id == gt) decision.target_position = obs.bbox;
                requests = build_bootstrap_requests(frame->observations, gt);
                decision.trained_this_frame = true;
            }
        } else {
            StepResult result = step(life, frame->observations, conf_fn);
            life = result.state;
            decision = std::move(result.decision);
            requests = std::move(result.requests);
            if (!decision.events.empty()) {
                for (auto e : decision.events)
                    if (e == LifecycleEvent::kReidSuccess)
                        artifacts.reid_events.push_back(
                            {f, life.target_id, frame->truth.gt_target_track_id});
            }
        }

        if (held_out && requests.any()) {
            requests = TrainRequests{};
            decision.trained_this_frame = false;
            decision.events.push_back(LifecycleEvent::kTrainSkipped);
        }
        if (requests.any()) submit(std::move(requests));

        artifacts.predictions.push_back(decision.target_position);
        artifacts.gt_boxes.push_back(frame->truth.gt_target_bbox);
        artifacts.truths.push_back(frame->truth);
        artifacts.event_log.push_back(format_event_log_line(f, life, decision));
    }

    if (concurrent) {
        queue.push({TrainRequests{}, true});
        learner_thread.join();
        slot.publish(learner.make_snapshot());
        artifacts.queue_dropped = queue.dropped();
    }
    eval_row(kNumSegments - 1);

    {
        auto model = read_model();
        artifacts.final_params = model->params;
        artifacts.final_classifier = model->clf;
    }
    artifacts.success_rate_pct =
        success_rate(artifacts.predictions, artifacts.gt_boxes);
    artifacts.r_meacc_pct = r_mEAcc(artifacts.acc_matrix);

    const std::string& scen = cfg.scenario.name;
    const std::string strat = to_string(cfg.strategy);
    artifacts.metrics_records.push_back(
        metric_record("r_mEAcc", scen, strat, cfg.seed, artifacts.r_meacc_pct));
    artifacts.metrics_records.push_back(metric_record(
        "success_rate", scen, strat, cfg.seed, artifacts.success_rate_pct));
    for (int j = 0; j < kNumSegments; ++j)
        artifacts.metrics_records.push_back(metric_record(
            "final_acc_seg" + std::to_string(j), scen, strat, cfg.seed,
            *artifacts.acc_matrix.a[kNumSegments - 1][static_cast<size_t>(j)]));

    artifacts.wall_time_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();

    if (!cfg.out_dir.empty()) {
        if (cfg.dump_memory) {
            std::filesystem::create_directories(cfg.out_dir);
            std::ofstream out(cfg.out_dir + "/memory_dump.txt");
            dump_memory(out, learner.short_term(), learner.long_term());
        }
        write_artifacts(cfg, artifacts);
    }
    return artifacts;
}

ComparisonTable compare(const std::vector<RunConfig>& configs) {
    if (configs.size() < 2)
        throw ConfigError("compare: needs at least two configs");
    const std::string scen = configs.front().scenario.name;
    for (const auto& cfg : configs)
        if (cfg.scenario.name != scen)
            throw ConfigError("compare: configs target different scenarios");

    struct Agg {
        std::vector<double> r_meacc, sr;
    };
    std::map<std::string, Agg> by_strategy;
    for (const auto& cfg : configs) {
        RunArtifacts artifacts = run(cfg);
        Agg& agg = by_strategy[to_string(cfg.strategy)];
        agg.r_meacc.push_back(artifacts.r_meacc_pct);
        agg.sr.push_back(artifacts.success_rate_pct);
    }

    auto mean = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x;
        return s / static_cast<double>(v.size());
    };
    auto stdev = [&](const std::vector<double>& v) {
        const double m = mean(v);
        double s = 0.0;
        for (double x : v) s += (x - m) * (x - m);
        return std::sqrt(s / static_cast<double>(v.size()));
    };

    ComparisonTable table;
    table.scenario = scen;
    for (const auto& [name, agg] : by_strategy) {
        ComparisonRow row;
        row.strategy = name;
        row.runs = static_cast<int>(agg.r_meacc.size());
        row.r_meacc_mean = mean(agg.r_meacc);
        row.r_meacc_std = stdev(agg.r_meacc);
        row.sr_mean = mean(agg.sr);
        row.sr_std = stdev(agg.sr);
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::string ComparisonTable::render() const {
    std::ostringstream out;
    out << "scenario: " << scenario << '\n';
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%-10s %6s %18s %18s\n", "strategy",
                  "runs", "r-mEAcc (%)", "success rate (%)");
    out << buf;
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof(buf), "%-10s %6d %10.2f +- %4.2f %10.2f +- %4.2f\n",
                      row.strategy.c_str(), row.runs, row.r_meacc_mean,
                      row.r_meacc_std, row.sr_mean, row.sr_std);
        out << buf;
    }
    return out.str();
}

namespace {

nlohmann::json scenario_to_json(const ScenarioConfig& scenario) {
    nlohmann::json j;
    j["name"] = scenario.name;
    j["seed"] = scenario.seed;
    j["persons"] = scenario.persons;
    j["frames"] = scenario.frames;
    j["distractor_similarity"] = scenario.distractor_similarity;
    j["flip_prob"] = scenario.flip_prob;
    j["noise_sigma"] = scenario.noise_sigma;
    j["image_w"] = scenario.image_w;
    j["image_h"] = scenario.image_h;
    j["d_raw"] = scenario.d_raw;
    j["drift_schedule"] = nlohmann::json::array();
    for (const auto& e : scenario.drift_schedule)
        j["drift_schedule"].push_back(
            {{"frame", e.frame}, {"scale", e.scale}, {"direction_id", e.direction_id}});
    j["occlusion_script"] = nlohmann::json::array();
    for (const auto& e : scenario.occlusion_script)
        j["occlusion_script"].push_back(
            {{"start", e.start},
             {"end", e.end},
             {"person", e.person},
             {"mode", e.mode == OcclusionEvent::Mode::kFull ? "full" : "parts"}});
    j["viewpoint_script"] = nlohmann::json::array();
    for (const auto& e : scenario.viewpoint_script)
        j["viewpoint_script"].push_back({{"frame", e.frame}, {"person", e.person}});
    return j;
}

ScenarioConfig scenario_from_json(const nlohmann::json& j) {
    ScenarioConfig scenario;
    scenario.name = j.value("name", std::string("custom"));
    scenario.seed = j.value("seed", std::uint64_t{1});
    scenario.persons = j.value("persons", 2);
    scenario.frames = j.value("frames", 1000L);
    scenario.distractor_similarity = j.value("distractor_similarity", 0.0);
    scenario.flip_prob = j.value("flip_prob", 0.0);
    scenario.noise_sigma = j.value("noise_sigma", 0.1);
    scenario.image_w = j.value("image_w", 640.0);
    scenario.image_h = j.value("image_h", 480.0);
    scenario.d_raw = j.value("d_raw", 32);
    for (const auto& e : j.value("drift_schedule", nlohmann::json::array()))
        scenario.drift_schedule.push_back({e.at("frame").get<long>(),
                                           e.at("scale").get<double>(),
                                           e.value("direction_id", 0)});
    for (const auto& e : j.value("occlusion_script", nlohmann::json::array()))
        scenario.occlusion_script.push_back(
            {e.at("start").get<long>(), e.at("end").get<long>(),
             e.at("person").get<int>(),
             e.value("mode", std::string("full")) == "parts"
                 ? OcclusionEvent::Mode::kParts
                 : OcclusionEvent::Mode::kFull});
    for (const auto& e : j.value("viewpoint_script", nlohmann::json::array()))
        scenario.viewpoint_script.push_back(
            {e.at("frame").get<long>(), e.at("person").get<int>()});
    return scenario;
}

} // namespace

std::string run_config_to_json(const RunConfig& cfg) {
    nlohmann::json j;
    j["scenario"] = scenario_to_json(cfg.scenario);
    j["strategy"] = to_string(cfg.strategy);
    j["mode"] = to_string(cfg.mode);
    j["seed"] = cfg.seed;
    j["out"] = cfg.out_dir;
    j["dump_memory"] = cfg.dump_memory;
    j["bootstrap_frames"] = cfg.bootstrap_frames;
    j["holdout_stride"] = cfg.holdout_stride;
    j["hyperparams"] = {
        {"S", cfg.hp.short_memory}, {"L", cfg.hp.long_memory},
        {"b_lt", cfg.hp.b_lt},      {"lambda", cfg.hp.lambda},
        {"delta_l", cfg.hp.delta_l}, {"delta_sw", cfg.hp.delta_sw},
        {"delta_reid", cfg.hp.delta_reid}, {"zeta_reid", cfg.hp.zeta_reid},
        {"lr", cfg.hp.lr},          {"margin", cfg.hp.margin},
        {"D_raw", cfg.hp.d_raw},    {"H", cfg.hp.hidden},
        {"C", cfg.hp.feat},         {"N", cfg.hp.parts}};
    return j.dump(2);
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    RunConfig cfg;
    cfg.seed = j.value("seed", std::uint64_t{1});
    if (j.contains("preset"))
        cfg.scenario = make_preset(j.at("preset").get<std::string>(), cfg.seed);
    else if (j.contains("scenario"))
        cfg.scenario = scenario_from_json(j.at("scenario"));
    else
        throw ConfigError("config: need either preset or scenario");
    cfg.strategy = strategy_from_string(j.value("strategy", std::string("reservoir")));
    cfg.mode = mode_from_string(j.value("mode", std::string("deterministic")));
    cfg.out_dir = j.value("out", std::string());
    cfg.dump_memory = j.value("dump_memory", false);
    cfg.bootstrap_frames = j.value("bootstrap_frames", 40L);
    cfg.holdout_stride = j.value("holdout_stride", 10);
    if (j.contains("hyperparams")) {
        const auto& h = j.at("hyperparams");
        cfg.hp.short_memory = h.value("S", cfg.hp.short_memory);
        cfg.hp.long_memory = h.value("L", cfg.hp.long_memory);
        cfg.hp.b_lt = h.value("b_lt", cfg.hp.b_lt);
        cfg.hp.lambda = h.value("lambda", cfg.hp.lambda);
        cfg.hp.delta_l = h.value("delta_l", cfg.hp.delta_l);
        cfg.hp.delta_sw = h.value("delta_sw", cfg.hp.delta_sw);
        cfg.hp.delta_reid = h.value("delta_reid", cfg.hp.delta_reid);
        cfg.hp.zeta_reid = h.value("zeta_reid", cfg.hp.zeta_reid);
        cfg.hp.lr = h.value("lr", cfg.hp.lr);
        cfg.hp.margin = h.value("margin", cfg.hp.margin);
        cfg.hp.d_raw = h.value("D_raw", cfg.hp.d_raw);
        cfg.hp.hidden = h.value("H", cfg.hp.hidden);
        cfg.hp.feat = h.value("C", cfg.hp.feat);
        cfg.hp.parts = h.value("N", cfg.hp.parts);
    }
    cfg.hp.validate();
    return cfg;
}

void write_artifacts(const RunConfig& cfg, const RunArtifacts& artifacts) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    {
        std::ofstream out(cfg.out_dir + "/events.log");
        for (const auto& line : artifacts.event_log) out << line << '\n';
    }
    {
        std::ofstream out(cfg.out_dir + "/metrics.txt");
        for (const auto& line : artifacts.metrics_records) out << line << '\n';
    }
    {
        std::ofstream out(cfg.out_dir + "/acc_matrix.txt");
        dump_acc_matrix(out, artifacts.acc_matrix);
    }
    {
        std::ofstream out(cfg.out_dir + "/checkpoint.txt");
        save_checkpoint(out, artifacts.final_params);
    }
    {
        std::ofstream out(cfg.out_dir + "/classifier.txt");
        save_classifier(out, artifacts.final_classifier);
    }
    {
        std::ofstream out(cfg.out_dir + "/config_echo.json");
        out << run_config_to_json(cfg) << '\n';
    }
    {
        nlohmann::json manifest;
        manifest["format_version"] = 1;
        manifest["seed"] = cfg.seed;
        manifest["strategy"] = to_string(cfg.strategy);
        manifest["mode"] = to_string(cfg.mode);
        manifest["scenario"] = cfg.scenario.name;
        manifest["frames"] = cfg.scenario.frames;
        manifest["warm_start_version"] = artifacts.warm_start_version;
        manifest["final_version"] = artifacts.final_params.version;
        manifest["queue_dropped"] = artifacts.queue_dropped;
        manifest["torn_snapshots"] = artifacts.torn_snapshots;
        manifest["wall_time_sec"] = artifacts.wall_time_sec;
        std::ofstream out(cfg.out_dir + "/manifest.json");
        out << manifest.dump(2) << '\n';
    }
}

} // namespace oclreid
