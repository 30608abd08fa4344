#pragma once

#include "exdm/common.hpp"

#include <optional>
#include <string>
#include <vector>

namespace exdm {

EXDM_DEFINE_ERROR(ModeMismatch);
EXDM_DEFINE_ERROR(BufferTooSmall);
EXDM_DEFINE_ERROR(PretrainModeHasNoRewards);

enum class BufferMode { Pretrain, Finetune };

struct Transition {
    VecF s;
    VecF a;
    VecF s_next;
    bool done = false;
    std::optional<float> r_ext;  // present iff the buffer is in finetune mode
};

struct Batch {
    MatF s;       // ds x m
    MatF a;       // da x m
    MatF s_next;  // ds x m
    VecF done;    // 1 when the transition ended its episode
    VecF r;       // zeros in pretrain mode
};

struct NStepBatch {
    MatF s;
    MatF a;
    VecF ret;       // sum_{i<k} gamma^i r_i, truncated at done or buffer head
    MatF s_boot;    // bootstrap state after k steps
    VecF discount;  // gamma^k
    VecF mask;      // 0 if the window hit a terminal transition
};

// Ring buffer with uniform with-replacement sampling. Single writer, single
// reader; not safe for concurrent mutation.
class ReplayBuffer {
  public:
    ReplayBuffer(std::size_t capacity, int s_dim, int a_dim, BufferMode mode, double gamma = 0.99)
        : capacity_(capacity), s_dim_(s_dim), a_dim_(a_dim), mode_(mode), gamma_(gamma) {}

    std::size_t size() const { return data_.size(); }
    std::size_t capacity() const { return capacity_; }
    BufferMode mode() const { return mode_; }
    double gamma() const { return gamma_; }
    int s_dim() const { return s_dim_; }
    int a_dim() const { return a_dim_; }

    void push(Transition t);

    // i = 0 is the oldest retained transition.
    const Transition& at_ordered(std::size_t i) const;

    Batch sample_batch(std::size_t m, Rng& rng) const;
    NStepBatch sample_nstep(std::size_t m, int n, Rng& rng) const;

    void save(const std::string& path) const;
    static ReplayBuffer load(const std::string& path);

  private:
    std::size_t capacity_;
    int s_dim_, a_dim_;
    BufferMode mode_;
    double gamma_;
    std::vector<Transition> data_;
    std::size_t head_ = 0;  // next write slot once full
};

}  // namespace exdm
