#pragma once

#include "exdm/common.hpp"
#include "exdm/net.hpp"

#include <algorithm>

namespace exdm {

struct DdpgOptions {
    double lr = 1e-4;
    double gamma = 0.99;
    double tau_q = 0.01;      // critic target EMA rate
    double expl_std = 0.2;    // exploration noise in [-1,1] action units
    double expl_clip = 0.3;
    int hidden = 1024;
};

struct DdpgLosses {
    double critic_loss = 0.0;
    double actor_loss = 0.0;
    double q_mean = 0.0;
};

// Deterministic tanh actor with clipped Gaussian exploration noise plus a
// critic with an EMA target. Actions live in [-1,1]^da; the environment
// layer scales them to world units.
template <typename T>
class ActorCritic {
  public:
    ActorCritic() = default;
    ActorCritic(int s_dim, int a_dim, const DdpgOptions& opt, Rng& rng)
        : s_dim_(s_dim), a_dim_(a_dim), opt_(opt),
          actor_({s_dim, opt.hidden, opt.hidden, a_dim}, Act::Relu, Act::Tanh, rng),
          critic_({s_dim + a_dim, opt.hidden, opt.hidden, 1}, Act::Relu, Act::None, rng),
          critic_target_(critic_),
          actor_opt_(static_cast<T>(opt.lr)), critic_opt_(static_cast<T>(opt.lr)) {}

    int s_dim() const { return s_dim_; }
    int a_dim() const { return a_dim_; }
    const DdpgOptions& options() const { return opt_; }

    Mat<T> act(const Mat<T>& s) const { return actor_.forward(s); }

    Mat<T> act_explore(const Mat<T>& s, Rng& rng) const {
        Mat<T> a = actor_.forward(s);
        Mat<T> noise = gaussian<T>(a.rows(), a.cols(), rng) * static_cast<T>(opt_.expl_std);
        noise = noise.cwiseMax(T(-opt_.expl_clip)).cwiseMin(T(opt_.expl_clip));
        return (a + noise).cwiseMax(T(-1)).cwiseMin(T(1));
    }

    Mat<T> q_value(const Mat<T>& s, const Mat<T>& a) const {
        return critic_.forward(join(s, a));
    }

    // One critic + actor step on a batch; r is the (already normalized)
    // reward, done masks the bootstrap term.
    DdpgLosses update(const Mat<T>& s, const Mat<T>& a, const Vec<T>& r, const Mat<T>& s_next,
                      const Vec<T>& done, Rng& rng) {
        const int B = static_cast<int>(s.cols());
        const T g = static_cast<T>(opt_.gamma);

        // target: r + gamma (1-done) Q_target(s', pi(s') + clipped noise)
        Mat<T> a_next = act_explore(s_next, rng);
        Mat<T> q_next = critic_target_.forward(join(s_next, a_next));
        Vec<T> y(B);
        for (int i = 0; i < B; ++i) y(i) = r(i) + g * (T(1) - done(i)) * q_next(0, i);

        Tape<T> tape;
        Mat<T> q = critic_.forward(join(s, a), &tape);
        Mat<T> dq(1, B);
        double loss = 0.0;
        for (int i = 0; i < B; ++i) {
            const T diff = q(0, i) - y(i);
            loss += static_cast<double>(diff) * static_cast<double>(diff);
            dq(0, i) = T(2) * diff / static_cast<T>(B);
        }
        loss /= B;
        critic_.backward(dq, tape, true);
        critic_opt_.step(critic_.params());

        // actor: maximize Q(s, pi(s))
        Tape<T> atape;
        Mat<T> a_pi = actor_.forward(s, &atape);
        Tape<T> qtape;
        Mat<T> q_pi = critic_.forward(join(s, a_pi), &qtape);
        Mat<T> dneg = Mat<T>::Constant(1, B, T(-1) / static_cast<T>(B));
        Mat<T> din = critic_.backward(dneg, qtape, false);
        actor_.backward(din.bottomRows(a_dim_), atape, true);
        actor_opt_.step(actor_.params());

        ema_update<T>(critic_target_, critic_, static_cast<T>(opt_.tau_q));

        DdpgLosses out;
        out.critic_loss = loss;
        out.actor_loss = -static_cast<double>(q_pi.row(0).mean());
        out.q_mean = static_cast<double>(q.row(0).mean());
        return out;
    }

    Mlp<T>& actor() { return actor_; }
    Mlp<T>& critic() { return critic_; }
    Mlp<T>& critic_target() { return critic_target_; }

  private:
    static Mat<T> join(const Mat<T>& s, const Mat<T>& a) {
        Mat<T> in(s.rows() + a.rows(), s.cols());
        in.topRows(s.rows()) = s;
        in.bottomRows(a.rows()) = a;
        return in;
    }

    int s_dim_ = 0, a_dim_ = 0;
    DdpgOptions opt_;
    Mlp<T> actor_, critic_, critic_target_;
    Adam<T> actor_opt_, critic_opt_;
};

}  // namespace exdm
