#pragma once

#include "exdm/common.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

namespace exdm {

enum class Act : std::uint8_t { None = 0, Relu = 1, Silu = 2, Tanh = 3 };

template <typename T>
Mat<T> apply_act(Act a, const Mat<T>& z) {
    switch (a) {
        case Act::None: return z;
        case Act::Relu: return z.cwiseMax(T(0));
        case Act::Silu: return z.array() / (T(1) + (-z.array()).exp());
        case Act::Tanh: return z.array().tanh();
    }
    return z;
}

// Derivative w.r.t. pre-activation z.
template <typename T>
Mat<T> act_grad(Act a, const Mat<T>& z) {
    switch (a) {
        case Act::None: return Mat<T>::Ones(z.rows(), z.cols());
        case Act::Relu: return (z.array() > T(0)).template cast<T>();
        case Act::Silu: {
            auto s = (T(1) / (T(1) + (-z.array()).exp())).eval();
            return (s * (T(1) + z.array() * (T(1) - s))).matrix();
        }
        case Act::Tanh: {
            auto y = z.array().tanh().eval();
            return (T(1) - y * y).matrix();
        }
    }
    return Mat<T>::Ones(z.rows(), z.cols());
}

template <typename T>
struct ParamRef {
    Mat<T>* value;
    Mat<T>* grad;
};

// Columns are samples throughout: W is out x in, batches are in x B.
template <typename T>
struct Dense {
    Mat<T> w;
    Mat<T> b;  // out x 1
    Mat<T> gw;
    Mat<T> gb;
    Act act = Act::None;

    Dense() = default;
    Dense(int in, int out, Act a, Rng& rng, T scale = T(1)) : act(a) {
        const T std = scale * static_cast<T>(1.0 / std::sqrt(static_cast<double>(in)));
        w = gaussian<T>(out, in, rng) * std;
        b = Mat<T>::Zero(out, 1);
        gw = Mat<T>::Zero(out, in);
        gb = Mat<T>::Zero(out, 1);
    }

    Mat<T> forward(const Mat<T>& x, Mat<T>* z_cache) const {
        Mat<T> z = (w * x).colwise() + b.col(0);
        if (z_cache) *z_cache = z;
        return apply_act(act, z);
    }

    // dy is gradient w.r.t. the activation output; returns gradient w.r.t. x.
    Mat<T> backward(const Mat<T>& x, const Mat<T>& z, const Mat<T>& dy, bool accum_params) {
        Mat<T> dz = dy.cwiseProduct(act_grad(act, z));
        if (accum_params) {
            gw.noalias() += dz * x.transpose();
            gb.col(0) += dz.rowwise().sum();
        }
        return w.transpose() * dz;
    }

    void collect(std::vector<ParamRef<T>>& out) {
        out.push_back({&w, &gw});
        out.push_back({&b, &gb});
    }
};

template <typename T>
struct Tape {
    std::vector<Mat<T>> xs;  // input of each dense layer
    std::vector<Mat<T>> zs;  // pre-activation of each dense layer
    void clear() {
        xs.clear();
        zs.clear();
    }
};

// Plain MLP: dims = {in, h1, ..., out}; hidden layers use `hidden`, last uses `out_act`.
template <typename T>
class Mlp {
  public:
    Mlp() = default;
    Mlp(const std::vector<int>& dims, Act hidden, Act out_act, Rng& rng) : dims_(dims) {
        for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
            const bool last = (i + 2 == dims.size());
            layers_.emplace_back(dims[i], dims[i + 1], last ? out_act : hidden, rng);
        }
    }

    int in_dim() const { return dims_.front(); }
    int out_dim() const { return dims_.back(); }

    Mat<T> forward(const Mat<T>& x, Tape<T>* tape = nullptr) const {
        Mat<T> h = x;
        for (const auto& l : layers_) {
            Mat<T> z;
            if (tape) tape->xs.push_back(h);
            h = l.forward(h, tape ? &z : nullptr);
            if (tape) tape->zs.push_back(std::move(z));
        }
        return h;
    }

    Mat<T> backward(const Mat<T>& dy, const Tape<T>& tape, bool accum_params = true) {
        Mat<T> d = dy;
        for (int i = static_cast<int>(layers_.size()) - 1; i >= 0; --i)
            d = layers_[i].backward(tape.xs[i], tape.zs[i], d, accum_params);
        return d;
    }

    std::vector<ParamRef<T>> params() {
        std::vector<ParamRef<T>> out;
        for (auto& l : layers_) l.collect(out);
        return out;
    }

    const std::vector<int>& dims() const { return dims_; }

  private:
    std::vector<int> dims_;
    std::vector<Dense<T>> layers_;
};

// Residual trunk: in_proj, then `blocks` of h += W2 act(W1 h), then linear head.
template <typename T>
class ResNet {
  public:
    ResNet() = default;
    ResNet(int in, int hidden, int out, int blocks, Act act, Rng& rng)
        : in_(in), hidden_(hidden), out_(out), nblocks_(blocks) {
        in_proj_ = Dense<T>(in, hidden, act, rng);
        for (int i = 0; i < blocks; ++i) {
            block1_.emplace_back(hidden, hidden, act, rng);
            block2_.emplace_back(hidden, hidden, Act::None, rng);
        }
        head_ = Dense<T>(hidden, out, Act::None, rng);
    }

    int in_dim() const { return in_; }
    int out_dim() const { return out_; }

    Mat<T> forward(const Mat<T>& x, Tape<T>* tape = nullptr) const {
        auto run = [&](const Dense<T>& l, const Mat<T>& h) {
            Mat<T> z;
            if (tape) tape->xs.push_back(h);
            Mat<T> y = l.forward(h, tape ? &z : nullptr);
            if (tape) tape->zs.push_back(std::move(z));
            return y;
        };
        Mat<T> h = run(in_proj_, x);
        for (int i = 0; i < nblocks_; ++i) {
            Mat<T> u = run(block1_[i], h);
            h = h + run(block2_[i], u);  // tape->xs stores u for block2
        }
        return run(head_, h);
    }

    Mat<T> backward(const Mat<T>& dy, const Tape<T>& tape, bool accum_params = true) {
        int k = static_cast<int>(tape.xs.size()) - 1;
        Mat<T> d = head_.backward(tape.xs[k], tape.zs[k], dy, accum_params);
        --k;
        for (int i = nblocks_ - 1; i >= 0; --i) {
            Mat<T> du = block2_[i].backward(tape.xs[k], tape.zs[k], d, accum_params);
            --k;
            Mat<T> dh = block1_[i].backward(tape.xs[k], tape.zs[k], du, accum_params);
            --k;
            d = d + dh;  // residual skip
        }
        return in_proj_.backward(tape.xs[0], tape.zs[0], d, accum_params);
    }

    std::vector<ParamRef<T>> params() {
        std::vector<ParamRef<T>> out;
        in_proj_.collect(out);
        for (int i = 0; i < nblocks_; ++i) {
            block1_[i].collect(out);
            block2_[i].collect(out);
        }
        head_.collect(out);
        return out;
    }

    int hidden() const { return hidden_; }
    int blocks() const { return nblocks_; }

  private:
    int in_ = 0, hidden_ = 0, out_ = 0, nblocks_ = 0;
    Dense<T> in_proj_;
    std::vector<Dense<T>> block1_, block2_;
    Dense<T> head_;
};

template <typename T>
class Adam {
  public:
    explicit Adam(T lr = T(1e-4), T beta1 = T(0.9), T beta2 = T(0.999), T eps = T(1e-8))
        : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

    void step(std::vector<ParamRef<T>> params) {
        if (m_.empty()) {
            for (auto& p : params) {
                m_.push_back(Mat<T>::Zero(p.value->rows(), p.value->cols()));
                v_.push_back(Mat<T>::Zero(p.value->rows(), p.value->cols()));
            }
        }
        ++t_;
        const T bc1 = T(1) - static_cast<T>(std::pow(static_cast<double>(beta1_), t_));
        const T bc2 = T(1) - static_cast<T>(std::pow(static_cast<double>(beta2_), t_));
        for (std::size_t i = 0; i < params.size(); ++i) {
            auto& g = *params[i].grad;
            m_[i] = beta1_ * m_[i] + (T(1) - beta1_) * g;
            v_[i] = (beta2_ * v_[i].array() + (T(1) - beta2_) * g.array().square()).matrix();
            auto mhat = (m_[i] / bc1).eval();
            auto vhat = (v_[i] / bc2).eval();
            params[i].value->array() -= lr_ * mhat.array() / (vhat.array().sqrt() + eps_);
            g.setZero();
        }
    }

    void set_lr(T lr) { lr_ = lr; }
    T lr() const { return lr_; }

  private:
    T lr_, beta1_, beta2_, eps_;
    long t_ = 0;
    std::vector<Mat<T>> m_, v_;
};

// EMA target-network update: target <- (1 - tau) target + tau source.
template <typename T, typename Net>
void ema_update(Net& target, Net& source, T tau) {
    auto tp = target.params();
    auto sp = source.params();
    for (std::size_t i = 0; i < tp.size(); ++i)
        *tp[i].value = (T(1) - tau) * (*tp[i].value) + tau * (*sp[i].value);
}

template <typename T, typename Net>
void copy_params(Net& dst, Net& src) {
    auto dp = dst.params();
    auto sp = src.params();
    for (std::size_t i = 0; i < dp.size(); ++i) *dp[i].value = *sp[i].value;
}

template <typename T, typename Net>
void zero_grads(Net& net) {
    for (auto& p : net.params()) p.grad->setZero();
}

// 64-dim sinusoidal features of t in [0,1], geometric frequencies.
template <typename T>
Mat<T> time_embedding(const RowVec<double>& t, int dim = 64) {
    const int half = dim / 2;
    Mat<T> out(dim, t.cols());
    for (int c = 0; c < t.cols(); ++c) {
        for (int k = 0; k < half; ++k) {
            const double freq = std::exp(std::log(1000.0) * k / std::max(1, half - 1));
            out(k, c) = static_cast<T>(std::sin(freq * t(c)));
            out(half + k, c) = static_cast<T>(std::cos(freq * t(c)));
        }
    }
    return out;
}

}  // namespace exdm
