#include "exdm/config.hpp"

#include <fstream>
#include <sstream>

namespace exdm {

namespace {
std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}
}  // namespace

Config Config::from_string(const std::string& text) {
    Config c;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto pos = line.find('#'); pos != std::string::npos) line = line.substr(0, pos);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigInvalid("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigInvalid("line " + std::to_string(lineno) + ": empty key");
        c.kv_[key] = value;
    }
    return c;
}

Config Config::from_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigInvalid("cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return from_string(ss.str());
}

std::string Config::get_string(const std::string& key, const std::string& def) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? def : it->second;
}

double Config::get_double(const std::string& key, double def) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return def;
    try {
        std::size_t used = 0;
        const double v = std::stod(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument(it->second);
        return v;
    } catch (const std::exception&) {
        throw ConfigInvalid(key + " = '" + it->second + "' is not a number");
    }
}

int Config::get_int(const std::string& key, int def) const {
    return static_cast<int>(get_long(key, def));
}

long long Config::get_long(const std::string& key, long long def) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return def;
    try {
        std::size_t used = 0;
        const long long v = std::stoll(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument(it->second);
        return v;
    } catch (const std::exception&) {
        throw ConfigInvalid(key + " = '" + it->second + "' is not an integer");
    }
}

bool Config::get_bool(const std::string& key, bool def) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return def;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw ConfigInvalid(key + " = '" + it->second + "' is not a bool");
}

void Config::save(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw ConfigInvalid("cannot write " + path);
    for (const auto& [k, v] : kv_) f << k << " = " << v << "\n";
}

RunConfig RunConfig::load(const Config& c) {
    RunConfig r;
    r.seed = static_cast<std::uint64_t>(c.get_long("seed", 0));

    r.env.maze_spec = c.get_string("env.maze_spec", r.env.maze_spec);
    r.env.episode_len = c.get_int("env.episode_len", r.env.episode_len);
    r.env.max_action_norm = c.get_double("env.max_action_norm", r.env.max_action_norm);

    r.model.hidden = c.get_int("model.hidden", r.model.hidden);
    r.model.blocks = c.get_int("model.blocks", r.model.blocks);
    r.model.guidance_hidden = c.get_int("model.guidance_hidden", r.model.guidance_hidden);
    r.model.guidance_layers = c.get_int("model.guidance_layers", r.model.guidance_layers);
    r.model.ac_hidden = c.get_int("model.ac_hidden", r.model.ac_hidden);
    r.model.lr = c.get_double("model.lr", r.model.lr);
    r.model.batch = c.get_int("model.batch", r.model.batch);

    r.diffusion.beta0 = c.get_double("diffusion.beta0", r.diffusion.beta0);
    r.diffusion.beta1 = c.get_double("diffusion.beta1", r.diffusion.beta1);
    r.diffusion.n_steps_collect = c.get_int("diffusion.n_steps_collect", r.diffusion.n_steps_collect);
    r.diffusion.n_steps_eval = c.get_int("diffusion.n_steps_eval", r.diffusion.n_steps_eval);
    r.diffusion.solver_order = c.get_int("diffusion.solver_order", r.diffusion.solver_order);
    r.diffusion.t_min = c.get_double("diffusion.t_min", r.diffusion.t_min);

    r.intrinsic.n_mc = c.get_int("intrinsic.n_mc", r.intrinsic.n_mc);
    const std::string norm = c.get_string("intrinsic.normalize", "running_std");
    if (norm != "running_std" && norm != "none")
        throw ConfigInvalid("intrinsic.normalize = '" + norm + "'");
    r.intrinsic.normalize = (norm == "running_std");
    if (c.has("intrinsic.clip")) r.intrinsic.clip = c.get_double("intrinsic.clip", 0.0);

    r.pretrain.total_steps = c.get_long("pretrain.total_steps", r.pretrain.total_steps);
    r.pretrain.updates_per_round = c.get_int("pretrain.updates_per_round", r.pretrain.updates_per_round);
    r.pretrain.env_steps_per_round =
        c.get_int("pretrain.env_steps_per_round", r.pretrain.env_steps_per_round);
    r.pretrain.seed_frames = c.get_long("pretrain.seed_frames", r.pretrain.seed_frames);
    r.pretrain.buffer_capacity = static_cast<std::size_t>(
        c.get_long("pretrain.buffer_capacity", static_cast<long long>(r.pretrain.buffer_capacity)));
    r.pretrain.log_every = c.get_long("pretrain.log_every", r.pretrain.log_every);
    r.pretrain.policy = c.get_string("pretrain.policy", r.pretrain.policy);
    r.pretrain.save_buffer = c.get_bool("pretrain.save_buffer", r.pretrain.save_buffer);

    r.ddpg.lr = c.get_double("ddpg.lr", r.ddpg.lr);
    r.ddpg.tau_q = c.get_double("ddpg.tau_q", r.ddpg.tau_q);
    r.ddpg.expl_std = c.get_double("ddpg.expl_std", r.ddpg.expl_std);
    r.ddpg.expl_clip = c.get_double("ddpg.expl_clip", r.ddpg.expl_clip);
    r.ddpg.gamma = c.get_double("ddpg.gamma", r.ddpg.gamma);

    r.finetune.beta = c.get_double("finetune.beta", r.finetune.beta);
    r.finetune.expectile = c.get_double("finetune.tau", r.finetune.expectile);
    r.finetune.k_negatives = c.get_int("finetune.k", r.finetune.k_negatives);
    r.finetune.q_method = c.get_string("finetune.q_method", r.finetune.q_method);
    r.finetune.budget = c.get_long("finetune.budget", r.finetune.budget);
    r.finetune.env_steps_per_iter =
        c.get_int("finetune.env_steps_per_iter", r.finetune.env_steps_per_iter);
    r.finetune.grad_steps = c.get_int("finetune.grad_steps", r.finetune.grad_steps);
    r.finetune.seed_steps = c.get_long("finetune.seed_steps", r.finetune.seed_steps);
    r.finetune.n_step = c.get_int("finetune.n_step", r.finetune.n_step);
    r.finetune.gamma = c.get_double("finetune.gamma", r.finetune.gamma);
    r.finetune.lr = c.get_double("finetune.lr", r.finetune.lr);
    r.finetune.goal_x = c.get_double("finetune.goal_x", r.finetune.goal_x);
    r.finetune.goal_y = c.get_double("finetune.goal_y", r.finetune.goal_y);
    r.finetune.task_kind = c.get_string("finetune.task_kind", r.finetune.task_kind);
    r.finetune.goal_radius = c.get_double("finetune.goal_radius", r.finetune.goal_radius);
    r.finetune.softmax_k = c.get_int("finetune.softmax_k", r.finetune.softmax_k);

    r.lab.wendel_trials = c.get_int("lab.wendel_trials", r.lab.wendel_trials);
    r.lab.volume_points = c.get_int("lab.volume_points", r.lab.volume_points);
    r.lab.theorem2_mdps = c.get_int("lab.theorem2_mdps", r.lab.theorem2_mdps);
    r.lab.theorem2_iters = c.get_int("lab.theorem2_iters", r.lab.theorem2_iters);
    r.lab.maxent_instances = c.get_int("lab.maxent_instances", r.lab.maxent_instances);
    r.lab.seed = static_cast<std::uint64_t>(c.get_long("lab.seed", 0));

    r.validate();
    return r;
}

void RunConfig::validate() const {
    auto require = [](bool ok, const std::string& key, const std::string& why) {
        if (!ok) throw ConfigInvalid(key + " " + why);
    };
    require(env.episode_len > 0, "env.episode_len", "must be positive");
    require(env.max_action_norm > 0, "env.max_action_norm", "must be positive");
    require(model.hidden > 0, "model.hidden", "must be positive");
    require(model.blocks >= 0, "model.blocks", "must be nonnegative");
    require(model.batch > 0, "model.batch", "must be positive");
    require(model.lr > 0, "model.lr", "must be positive");
    require(diffusion.beta1 > diffusion.beta0, "diffusion.beta1", "must exceed beta0");
    require(diffusion.beta0 > 0, "diffusion.beta0", "must be positive");
    require(diffusion.n_steps_collect >= 1, "diffusion.n_steps_collect", "must be >= 1");
    require(diffusion.solver_order == 1 || diffusion.solver_order == 2,
            "diffusion.solver_order", "must be 1 or 2");
    require(diffusion.t_min > 0 && diffusion.t_min < 1, "diffusion.t_min", "must be in (0,1)");
    require(intrinsic.n_mc >= 1, "intrinsic.n_mc", "must be >= 1");
    require(pretrain.total_steps >= 0, "pretrain.total_steps", "must be nonnegative");
    require(pretrain.updates_per_round >= 0, "pretrain.updates_per_round", "must be nonnegative");
    require(pretrain.env_steps_per_round > 0, "pretrain.env_steps_per_round", "must be positive");
    require(pretrain.buffer_capacity > 0, "pretrain.buffer_capacity", "must be positive");
    require(pretrain.policy == "ddpg" || pretrain.policy == "random", "pretrain.policy",
            "must be ddpg or random");
    require(ddpg.gamma > 0 && ddpg.gamma < 1, "ddpg.gamma", "must be in (0,1)");
    require(ddpg.tau_q > 0 && ddpg.tau_q <= 1, "ddpg.tau_q", "must be in (0,1]");
    require(finetune.beta > 0, "finetune.beta", "must be positive");
    require(finetune.expectile > 0.5 && finetune.expectile < 1, "finetune.tau",
            "must be in (0.5,1)");
    require(finetune.k_negatives >= 2, "finetune.k", "must be >= 2");
    require(finetune.q_method == "iql" || finetune.q_method == "in_sample_softmax",
            "finetune.q_method", "must be iql or in_sample_softmax");
    require(finetune.gamma > 0 && finetune.gamma < 1, "finetune.gamma", "must be in (0,1)");
    require(finetune.n_step >= 1, "finetune.n_step", "must be >= 1");
    require(finetune.task_kind == "dense" || finetune.task_kind == "sparse", "finetune.task_kind",
            "must be dense or sparse");
}

}  // namespace exdm
