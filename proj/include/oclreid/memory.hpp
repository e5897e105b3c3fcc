#ifndef OCLREID_MEMORY_HPP
#define OCLREID_MEMORY_HPP

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <optional>
#include <vector>

#include "oclreid/core.hpp"
#include "oclreid/extractor.hpp"
#include "oclreid/rng.hpp"

namespace oclreid {

// Most-recent-K buffer; inserting at capacity evicts the oldest element.
class ShortTermMemory {
public:
    explicit ShortTermMemory(size_t capacity) : capacity_(capacity) {}

    void push(Observation obs);
    const std::deque<Observation>& buffer() const { return buf_; }
    size_t capacity() const { return capacity_; }
    size_t size() const { return buf_.size(); }
    bool empty() const { return buf_.empty(); }

private:
    size_t capacity_;
    std::deque<Observation> buf_;
};

enum class ConsolidationPolicy { kReservoir, kMir };

// Capacity-bounded archive with reservoir replacement and a sub-quota for
// negatives (oldest negative evicted when the quota is exceeded).
class LongTermMemory {
public:
    LongTermMemory(size_t capacity, ConsolidationPolicy policy,
                   size_t neg_cap)
        : capacity_(capacity), neg_cap_(neg_cap), policy_(policy) {}

    // One consolidation offer; n_seen always advances.
    void offer(Observation obs, Rng& rng);

    const std::vector<Observation>& buffer() const { return buf_; }
    std::uint64_t n_seen() const { return n_seen_; }
    size_t capacity() const { return capacity_; }
    ConsolidationPolicy policy() const { return policy_; }
    size_t negative_count() const;

private:
    size_t capacity_;
    size_t neg_cap_;
    ConsolidationPolicy policy_;
    std::uint64_t n_seen_ = 0;
    std::vector<Observation> buf_;
};

// Loss-guided keyframe bookkeeping: frozen extractor snapshot plus the loss
// recorded at the last accepted keyframe.
struct KeyframeState {
    ExtractorParams snapshot;
    double loss_ref = 0.0; // l_t
    double delta_threshold = 0.02;
    bool initialized = false;
};

struct KeyframeDecision {
    bool accept = false;
    double delta = 0.0;
};

// delta = mixed_loss(snapshot, {obs} + context).total - l_t; accept iff
// delta strictly exceeds the threshold.  The caller refreshes snapshot and
// l_t at the next optimization after an accept.
KeyframeDecision keyframe_decision(const KeyframeState& state,
                                   const Observation& obs,
                                   const TrainBatch& context,
                                   double margin = kDefaultTripletMargin);

// m_st = the whole short-term buffer; m_lt = uniform sample without
// replacement of min(b_lt, |L|).  Must yield >= 1 positive and negative.
TrainBatch sample_replay(const ShortTermMemory& st, const LongTermMemory& lt,
                         size_t b_lt, Rng& rng);

// Maximally-interfered retrieval: score candidates by the per-sample loss
// increase under a virtual update on the incoming batch.
std::vector<Observation> mir_retrieve(const LongTermMemory& lt,
                                      const ExtractorParams& params,
                                      const TrainBatch& incoming,
                                      size_t candidate_count, size_t b_lt,
                                      double lr, Rng& rng,
                                      double margin = kDefaultTripletMargin);

// Memory dump: policy metadata plus both buffers as observation records.
void dump_memory(std::ostream& out, const ShortTermMemory& st,
                 const LongTermMemory& lt);

} // namespace oclreid

#endif
