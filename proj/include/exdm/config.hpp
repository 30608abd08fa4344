#pragma once

#include "exdm/common.hpp"

#include <map>
#include <optional>
#include <string>

namespace exdm {

// Flat `section.key = value` text config; '#' starts a comment.
class Config {
  public:
    static Config from_string(const std::string& text);
    static Config from_file(const std::string& path);

    bool has(const std::string& key) const { return kv_.count(key) != 0; }
    void set(const std::string& key, const std::string& value) { kv_[key] = value; }

    std::string get_string(const std::string& key, const std::string& def) const;
    double get_double(const std::string& key, double def) const;
    int get_int(const std::string& key, int def) const;
    long long get_long(const std::string& key, long long def) const;
    bool get_bool(const std::string& key, bool def) const;

    void save(const std::string& path) const;
    const std::map<std::string, std::string>& entries() const { return kv_; }

  private:
    std::map<std::string, std::string> kv_;
};

struct RunConfig {
    std::uint64_t seed = 0;

    struct Env {
        std::string maze_spec = "data/mazes/square_a.txt";
        int episode_len = 250;
        double max_action_norm = 0.05;
    } env;

    struct Model {
        int hidden = 256;        // diffusion nets
        int blocks = 3;          // residual blocks
        int guidance_hidden = 256;
        int guidance_layers = 4;
        int ac_hidden = 256;     // actor/critic (paper scale: 1024)
        double lr = 1e-4;
        int batch = 256;
    } model;

    struct Diffusion {
        double beta0 = 0.1;
        double beta1 = 20.0;
        int n_steps_collect = 15;
        int n_steps_eval = 15;
        int solver_order = 2;
        double t_min = 1e-3;
    } diffusion;

    struct Intrinsic {
        int n_mc = 8;
        bool normalize = true;
        std::optional<double> clip;
    } intrinsic;

    struct Pretrain {
        long long total_steps = 50000;
        int updates_per_round = 1;
        int env_steps_per_round = 2;
        long long seed_frames = 4000;
        std::size_t buffer_capacity = 1000000;
        long long log_every = 1000;
        std::string policy = "ddpg";  // or "random"
        bool save_buffer = false;
    } pretrain;

    struct Ddpg {
        double lr = 1e-4;
        double tau_q = 0.01;
        double expl_std = 0.2;
        double expl_clip = 0.3;
        double gamma = 0.99;
    } ddpg;

    struct Finetune {
        double beta = 1.0;
        double expectile = 0.7;
        int k_negatives = 16;
        std::string q_method = "iql";  // or "in_sample_softmax"
        long long budget = 20000;
        int env_steps_per_iter = 50;
        int grad_steps = 100;
        long long seed_steps = 1000;
        int n_step = 3;
        double gamma = 0.99;
        double lr = 3e-4;
        double goal_x = 0.85;
        double goal_y = 0.85;
        std::string task_kind = "dense";  // or "sparse"
        double goal_radius = 0.1;
        int softmax_k = 4;  // actions per state for the in_sample_softmax ablation
    } finetune;

    struct Lab {
        int wendel_trials = 100000;
        int volume_points = 200000;
        int theorem2_mdps = 100;
        int theorem2_iters = 300;
        int maxent_instances = 20;
        std::uint64_t seed = 0;
    } lab;

    static RunConfig load(const Config& c);
    void validate() const;  // throws ConfigInvalid naming the offending key
};

}  // namespace exdm
