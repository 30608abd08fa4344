#include "exdm/replay.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace exdm {

void ReplayBuffer::push(Transition t) {
    if (t.s.size() != s_dim_ || t.s_next.size() != s_dim_)
        throw DimMismatch("state dim " + std::to_string(t.s.size()) + ", buffer expects " +
                          std::to_string(s_dim_));
    if (t.a.size() != a_dim_)
        throw DimMismatch("action dim " + std::to_string(t.a.size()) + ", buffer expects " +
                          std::to_string(a_dim_));
    if ((mode_ == BufferMode::Finetune) != t.r_ext.has_value())
        throw ModeMismatch(mode_ == BufferMode::Finetune ? "finetune buffer needs r_ext"
                                                         : "pretrain buffer takes no r_ext");
    if (data_.size() < capacity_) {
        data_.push_back(std::move(t));
    } else {
        data_[head_] = std::move(t);
        head_ = (head_ + 1) % capacity_;
    }
}

const Transition& ReplayBuffer::at_ordered(std::size_t i) const {
    return data_[(head_ + i) % data_.size()];
}

Batch ReplayBuffer::sample_batch(std::size_t m, Rng& rng) const {
    if (size() == 0) throw BufferTooSmall("empty buffer");
    Batch b;
    b.s.resize(s_dim_, m);
    b.a.resize(a_dim_, m);
    b.s_next.resize(s_dim_, m);
    b.done.resize(m);
    b.r = VecF::Zero(m);
    for (std::size_t k = 0; k < m; ++k) {
        const Transition& t = at_ordered(uniform_index(size(), rng));
        b.s.col(k) = t.s;
        b.a.col(k) = t.a;
        b.s_next.col(k) = t.s_next;
        b.done(k) = t.done ? 1.0f : 0.0f;
        if (t.r_ext) b.r(k) = *t.r_ext;
    }
    return b;
}

NStepBatch ReplayBuffer::sample_nstep(std::size_t m, int n, Rng& rng) const {
    if (mode_ != BufferMode::Finetune) throw PretrainModeHasNoRewards("sample_nstep");
    if (size() < static_cast<std::size_t>(n)) throw BufferTooSmall("size " + std::to_string(size()));
    NStepBatch b;
    b.s.resize(s_dim_, m);
    b.a.resize(a_dim_, m);
    b.ret.resize(m);
    b.s_boot.resize(s_dim_, m);
    b.discount.resize(m);
    b.mask.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t i = uniform_index(size(), rng);
        double ret = 0.0, g = 1.0;
        int used = 0;
        bool terminal = false;
        const Transition* last = nullptr;
        for (int j = 0; j < n && i + j < size(); ++j) {
            const Transition& t = at_ordered(i + j);
            ret += g * static_cast<double>(*t.r_ext);
            g *= gamma_;
            ++used;
            last = &t;
            if (t.done) {
                terminal = true;
                break;
            }
        }
        b.s.col(k) = at_ordered(i).s;
        b.a.col(k) = at_ordered(i).a;
        b.ret(k) = static_cast<float>(ret);
        b.s_boot.col(k) = last->s_next;
        b.discount(k) = static_cast<float>(std::pow(gamma_, used));
        b.mask(k) = terminal ? 0.0f : 1.0f;
    }
    return b;
}

namespace {
void write_vec(std::ofstream& f, const VecF& v) {
    f.write(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(float));
}
void read_vec(std::ifstream& f, VecF& v) {
    f.read(reinterpret_cast<char*>(v.data()), v.size() * sizeof(float));
}
}  // namespace

void ReplayBuffer::save(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("BufferSaveFailed", path);
    const char magic[8] = {'E', 'X', 'D', 'M', 'B', 'U', 'F', '1'};
    f.write(magic, 8);
    const std::uint64_t cap = capacity_, n = size();
    const std::int32_t sd = s_dim_, ad = a_dim_, md = mode_ == BufferMode::Finetune ? 1 : 0;
    f.write(reinterpret_cast<const char*>(&cap), 8);
    f.write(reinterpret_cast<const char*>(&n), 8);
    f.write(reinterpret_cast<const char*>(&sd), 4);
    f.write(reinterpret_cast<const char*>(&ad), 4);
    f.write(reinterpret_cast<const char*>(&md), 4);
    f.write(reinterpret_cast<const char*>(&gamma_), 8);
    for (std::size_t i = 0; i < n; ++i) {
        const Transition& t = at_ordered(i);
        write_vec(f, t.s);
        write_vec(f, t.a);
        write_vec(f, t.s_next);
        const std::uint8_t done = t.done ? 1 : 0;
        f.write(reinterpret_cast<const char*>(&done), 1);
        const float r = t.r_ext.value_or(0.0f);
        f.write(reinterpret_cast<const char*>(&r), 4);
    }
}

ReplayBuffer ReplayBuffer::load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("BufferLoadFailed", path);
    char magic[8];
    f.read(magic, 8);
    if (std::memcmp(magic, "EXDMBUF1", 8) != 0) throw Error("BufferLoadFailed", "bad magic");
    std::uint64_t cap, n;
    std::int32_t sd, ad, md;
    double gamma;
    f.read(reinterpret_cast<char*>(&cap), 8);
    f.read(reinterpret_cast<char*>(&n), 8);
    f.read(reinterpret_cast<char*>(&sd), 4);
    f.read(reinterpret_cast<char*>(&ad), 4);
    f.read(reinterpret_cast<char*>(&md), 4);
    f.read(reinterpret_cast<char*>(&gamma), 8);
    ReplayBuffer buf(cap, sd, ad, md ? BufferMode::Finetune : BufferMode::Pretrain, gamma);
    for (std::uint64_t i = 0; i < n; ++i) {
        Transition t;
        t.s.resize(sd);
        t.a.resize(ad);
        t.s_next.resize(sd);
        read_vec(f, t.s);
        read_vec(f, t.a);
        read_vec(f, t.s_next);
        std::uint8_t done;
        float r;
        f.read(reinterpret_cast<char*>(&done), 1);
        f.read(reinterpret_cast<char*>(&r), 4);
        t.done = done != 0;
        if (md) t.r_ext = r;
        buf.push(std::move(t));
    }
    return buf;
}

}  // namespace exdm
