#include "oclreid/memory.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

#include "oclreid/errors.hpp"

namespace oclreid {

void ShortTermMemory::push(Observation obs) {
    if (!obs.vis.any())
        throw ContractViolationError("short-term push: no visible part");
    buf_.push_back(std::move(obs));
    if (buf_.size() > capacity_) buf_.pop_front();
}

size_t LongTermMemory::negative_count() const {
    size_t n = 0;
    for (const auto& o : buf_) n += (o.label == 0);
    return n;
}

void LongTermMemory::offer(Observation obs, Rng& rng) {
    if (!obs.vis.any())
        throw ContractViolationError("long-term offer: no visible part");
    ++n_seen_;
    if (buf_.size() < capacity_) {
        buf_.push_back(std::move(obs));
    } else {
        const std::uint64_t i = rng.below(n_seen_);
        if (i < capacity_) buf_[static_cast<size_t>(i)] = std::move(obs);
    }
    // negative sub-quota: drop oldest negative (lowest frame wins eviction)
    while (negative_count() > neg_cap_) {
        auto oldest = buf_.end();
        for (auto it = buf_.begin(); it != buf_.end(); ++it)
            if (it->label == 0 && (oldest == buf_.end() || it->frame < oldest->frame))
                oldest = it;
        buf_.erase(oldest);
    }
}

KeyframeDecision keyframe_decision(const KeyframeState& state,
                                   const Observation& obs,
                                   const TrainBatch& context, double margin) {
    if (obs.label != 1)
        throw ContractViolationError("keyframe_decision: non-target sample");
    if (!state.initialized)
        throw ContractViolationError("keyframe_decision: state not initialized");
    TrainBatch batch;
    batch.add(obs, Provenance::kShortTerm);
    for (size_t i = 0; i < context.size(); ++i)
        batch.add(context.samples[i], context.tags[i]);
    double loss;
    try {
        loss = mixed_loss(state.snapshot, batch, margin).total;
    } catch (const MiningImpossibleError&) {
        throw KeyframeUndecidableError(
            "keyframe_decision: context supplies no negative");
    }
    KeyframeDecision decision;
    decision.delta = loss - state.loss_ref;
    decision.accept = decision.delta > state.delta_threshold;
    return decision;
}

namespace {

// Uniform sample of k indices from [0, n) without replacement.
std::vector<size_t> sample_indices(size_t n, size_t k, Rng& rng) {
    std::vector<size_t> idx(n);
    std::iota(idx.begin(), idx.end(), size_t{0});
    k = std::min(k, n);
    for (size_t i = 0; i < k; ++i) {
        const size_t j = i + static_cast<size_t>(rng.below(n - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    return idx;
}

} // namespace

TrainBatch sample_replay(const ShortTermMemory& st, const LongTermMemory& lt,
                         size_t b_lt, Rng& rng) {
    if (st.empty())
        throw ReplayUnavailableError("sample_replay: empty short-term memory");
    auto build = [&](size_t lt_count) {
        TrainBatch batch;
        for (const auto& obs : st.buffer())
            batch.add(obs, Provenance::kShortTerm);
        for (size_t i : sample_indices(lt.buffer().size(), lt_count, rng))
            batch.add(lt.buffer()[i], Provenance::kLongTerm);
        return batch;
    };
    auto trainable = [](const TrainBatch& b) {
        int pos = 0, neg = 0;
        for (const auto& s : b.samples) (s.label == 1 ? pos : neg)++;
        return pos >= 1 && neg >= 1;
    };
    TrainBatch batch = build(b_lt);
    if (trainable(batch)) return batch;
    if (b_lt < lt.buffer().size()) { // relax to the whole long-term buffer
        batch = build(lt.buffer().size());
        if (trainable(batch)) return batch;
    }
    throw ReplayUnavailableError(
        "sample_replay: cannot assemble a positive+negative batch");
}

std::vector<Observation> mir_retrieve(const LongTermMemory& lt,
                                      const ExtractorParams& params,
                                      const TrainBatch& incoming,
                                      size_t candidate_count, size_t b_lt,
                                      double lr, Rng& rng, double margin) {
    if (candidate_count < b_lt)
        throw ConfigError("mir_retrieve: candidate_count < b_lt");
    std::vector<size_t> candidates =
        sample_indices(lt.buffer().size(), candidate_count, rng);
    const ExtractorParams virtual_params =
        sgd_step(params, incoming, lr, margin).first;

    auto candidate_loss = [&](const ExtractorParams& p, const Observation& obs) {
        TrainBatch batch;
        batch.add(obs, Provenance::kLongTerm);
        for (size_t i = 0; i < incoming.size(); ++i)
            batch.add(incoming.samples[i], incoming.tags[i]);
        return mixed_loss(p, batch, margin).per_sample.front();
    };

    struct Scored {
        size_t index;
        double score;
    };
    std::vector<Scored> scored;
    scored.reserve(candidates.size());
    for (size_t i : candidates) {
        const Observation& obs = lt.buffer()[i];
        scored.push_back(
            {i, candidate_loss(virtual_params, obs) - candidate_loss(params, obs)});
    }
    std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.index < b.index;
    });
    std::vector<Observation> result;
    for (size_t i = 0; i < std::min(b_lt, scored.size()); ++i)
        result.push_back(lt.buffer()[scored[i].index]);
    return result;
}

void dump_memory(std::ostream& out, const ShortTermMemory& st,
                 const LongTermMemory& lt) {
    out << "short-term capacity=" << st.capacity() << " size=" << st.size()
        << '\n';
    for (const auto& obs : st.buffer()) out << observation_to_record(obs) << '\n';
    out << "long-term capacity=" << lt.capacity()
        << " size=" << lt.buffer().size() << " n_seen=" << lt.n_seen()
        << " policy="
        << (lt.policy() == ConsolidationPolicy::kReservoir ? "reservoir" : "mir")
        << '\n';
    for (const auto& obs : lt.buffer()) out << observation_to_record(obs) << '\n';
}

} // namespace oclreid
