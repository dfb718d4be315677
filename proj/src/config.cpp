#include "radwave/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include "toml++/toml.hpp"

namespace radwave {

std::string_view to_string(Command c) {
    switch (c) {
        case Command::Validate: return "validate";
        case Command::Simulate: return "simulate";
        case Command::Linearize: return "linearize";
        case Command::Inequalities: return "inequalities";
    }
    return "?";
}

Command parse_command(std::string_view name) {
    if (name == "validate") return Command::Validate;
    if (name == "simulate") return Command::Simulate;
    if (name == "linearize") return Command::Linearize;
    if (name == "inequalities") return Command::Inequalities;
    throw DomainError("unknown command '" + std::string(name) +
                      "' (expected validate, simulate, linearize or inequalities)");
}

namespace {

std::string join_lines(const std::vector<std::string>& v) {
    std::string out = "invalid configuration:";
    for (const auto& s : v) out += "\n  " + s;
    return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : Error(join_lines(violations)), violations_(std::move(violations)) {}

namespace {

// Reads typed values out of one TOML table, remembering which keys were
// consumed so leftovers can be reported as unknown.
class Section {
public:
    Section(const toml::table* table, std::string name, std::string source, std::vector<std::string>& errors)
        : table_(table), name_(std::move(name)), source_(std::move(source)), errors_(errors) {}

    bool present() const { return table_ != nullptr; }

    std::string where(const toml::node* node) const {
        std::ostringstream os;
        os << source_;
        if (node) os << ':' << node->source().begin.line;
        os << ": ";
        return os.str();
    }

    void error(const toml::node* node, const std::string& msg) {
        errors_.push_back(where(node) + (name_.empty() ? "" : "[" + name_ + "] ") + msg);
    }

    const toml::node* find(std::string_view key) {
        allowed_.insert(std::string(key));
        return table_ ? table_->get(key) : nullptr;
    }

    template <class T>
    void read(std::string_view key, T& out, bool required = false) {
        const toml::node* node = find(key);
        if (!node) {
            if (required && present()) error(nullptr, "missing required key '" + std::string(key) + "'");
            return;
        }
        convert(node, key, out);
    }

    template <class T>
    void read(std::string_view key, std::optional<T>& out) {
        const toml::node* node = find(key);
        if (!node) return;
        T value{};
        if (convert(node, key, value)) out = value;
    }

    void reject_unknown() {
        if (!table_) return;
        for (auto&& [k, v] : *table_) {
            if (!allowed_.count(std::string(k.str()))) {
                std::ostringstream os;
                os << source_ << ':' << k.source().begin.line << ": unknown key '" << k.str() << "' in ["
                   << name_ << "]";
                errors_.push_back(os.str());
            }
        }
    }

private:
    bool type_error(const toml::node* node, std::string_view key, const char* expected) {
        error(node, "key '" + std::string(key) + "' must be " + expected);
        return false;
    }

    bool convert(const toml::node* node, std::string_view key, double& out) {
        if (auto f = node->as_floating_point()) return out = f->get(), true;
        if (auto i = node->as_integer()) return out = static_cast<double>(i->get()), true;
        return type_error(node, key, "a number");
    }
    bool convert(const toml::node* node, std::string_view key, int& out) {
        if (auto i = node->as_integer()) return out = static_cast<int>(i->get()), true;
        return type_error(node, key, "an integer");
    }
    bool convert(const toml::node* node, std::string_view key, std::size_t& out) {
        if (auto i = node->as_integer(); i && i->get() >= 0) return out = static_cast<std::size_t>(i->get()), true;
        return type_error(node, key, "a non-negative integer");
    }
    bool convert(const toml::node* node, std::string_view key, bool& out) {
        if (auto b = node->as_boolean()) return out = b->get(), true;
        return type_error(node, key, "a boolean");
    }
    bool convert(const toml::node* node, std::string_view key, std::string& out) {
        if (auto s = node->as_string()) return out = s->get(), true;
        return type_error(node, key, "a string");
    }
    template <class T>
    bool convert(const toml::node* node, std::string_view key, std::vector<T>& out) {
        const toml::array* arr = node->as_array();
        if (!arr) return type_error(node, key, "an array");
        std::vector<T> values;
        for (const toml::node& item : *arr) {
            T value{};
            if (!convert(&item, key, value)) return false;
            values.push_back(value);
        }
        out = std::move(values);
        return true;
    }
    bool convert(const toml::node* node, std::string_view key, std::array<double, 3>& out) {
        std::vector<double> v;
        if (!convert(node, key, v)) return false;
        if (v.size() != 3) return type_error(node, key, "a triple [N, theta, lambda]");
        out = {v[0], v[1], v[2]};
        return true;
    }

    const toml::table* table_;
    std::string name_;
    std::string source_;
    std::vector<std::string>& errors_;
    std::set<std::string> allowed_;
};

const toml::table* subtable(const toml::table& root, std::string_view key) {
    const toml::node* n = root.get(key);
    return n ? n->as_table() : nullptr;
}

void require_block(const Section& s, std::string_view name, Command cmd, std::vector<std::string>& errors) {
    if (!s.present())
        errors.push_back("missing [" + std::string(name) + "] block required by command '" +
                         std::string(to_string(cmd)) + "'");
}

}  // namespace

ExperimentConfig parse_config(std::string_view text, std::string_view source_name, std::optional<Command> command) {
    const std::string source(source_name);
    toml::table root;
    try {
        root = toml::parse(text, source);
    } catch (const toml::parse_error& e) {
        std::ostringstream os;
        os << source << ':' << e.source().begin.line << ": TOML syntax error: " << e.description();
        throw ConfigError({os.str()});
    }

    std::vector<std::string> errors;
    ExperimentConfig cfg;

    // Top level.
    std::set<std::string> top_keys = {"command", "allow_outside_theorems", "output_dir", "model",
                                      "grid",    "run",                    "data",       "sweep",
                                      "inequalities"};
    for (auto&& [k, v] : root) {
        if (!top_keys.count(std::string(k.str()))) {
            std::ostringstream os;
            os << source << ':' << k.source().begin.line << ": unknown key '" << k.str() << "'";
            errors.push_back(os.str());
        }
    }
    Section top(&root, "", source, errors);
    std::string command_name;
    top.read("command", command_name);
    if (!root.get("command") && !command) errors.push_back(source + ": missing required key 'command'");
    top.read("allow_outside_theorems", cfg.allow_outside_theorems);
    top.read("output_dir", cfg.output_dir);
    if (!command_name.empty()) {
        try {
            cfg.command = parse_command(command_name);
            if (command && *command != cfg.command)
                top.error(root.get("command"), "config is for '" + command_name + "' but was run as '" +
                                                   std::string(to_string(*command)) + "'");
        } catch (const DomainError& e) {
            errors.push_back(source + ": " + e.what());
        }
    } else if (command) {
        cfg.command = *command;
    }

    // [model]
    Section model(subtable(root, "model"), "model", source, errors);
    {
        std::string kind = "linear";
        std::optional<double> mass, p;
        model.read("dim", cfg.model.dim, true);
        model.read("kind", kind, true);
        model.read("b", cfg.model.b);
        model.read("p", p);
        model.read("mass", mass);
        model.reject_unknown();
        if (model.present()) {
            try {
                cfg.model.kind = parse_kind(kind);
            } catch (const DomainError& e) {
                model.error(model.find("kind"), e.what());
            }
            switch (cfg.model.kind) {
                case NonlinearityKind::Exp2D: cfg.model.mass = 1.0; break;
                case NonlinearityKind::Power3D: cfg.model.mass = 0.0; break;
                case NonlinearityKind::Linear: cfg.model.mass = cfg.model.dim == 2 ? 1.0 : 0.0; break;
            }
            if (mass) {
                if (cfg.model.kind != NonlinearityKind::Linear && *mass != cfg.model.mass)
                    model.error(model.find("mass"), "mass is fixed by the nonlinearity kind");
                cfg.model.mass = *mass;
            }
            if (cfg.model.kind == NonlinearityKind::Power3D) {
                if (!p) model.error(nullptr, "power3d requires 'p'");
                cfg.model.p = p.value_or(0.0);
            } else if (p) {
                model.error(model.find("p"), "'p' only applies to power3d");
            }
            try {
                check_invariants(cfg.model);
            } catch (const DomainError& e) {
                model.error(nullptr, e.what());
            }
        }
    }

    Section grid(subtable(root, "grid"), "grid", source, errors);
    grid.read("r_max", cfg.grid.r_max);
    grid.read("num_cells", cfg.grid.num_cells);
    grid.read("dr", cfg.grid.dr);
    grid.reject_unknown();
    if (cfg.grid.num_cells && cfg.grid.dr) grid.error(nullptr, "give either num_cells or dr, not both");
    if (cfg.grid.r_max && !(*cfg.grid.r_max > 0.0)) grid.error(grid.find("r_max"), "r_max must be positive");
    if (cfg.grid.dr && !(*cfg.grid.dr > 0.0)) grid.error(grid.find("dr"), "dr must be positive");
    if (cfg.grid.num_cells && *cfg.grid.num_cells < 8) grid.error(grid.find("num_cells"), "num_cells must be >= 8");

    Section run(subtable(root, "run"), "run", source, errors);
    run.read("T", cfg.run.T, true);
    run.read("cfl", cfg.run.cfl);
    run.read("snapshot_stride", cfg.run.snapshot_stride);
    run.read("drift_gate", cfg.run.drift_gate);
    run.reject_unknown();
    if (!(cfg.run.T > 0.0)) run.error(run.find("T"), "T must be positive");
    if (!(cfg.run.cfl > 0.0) || cfg.run.cfl > 1.0) run.error(run.find("cfl"), "cfl must lie in (0, 1]");
    if (cfg.run.snapshot_stride == 0) run.error(run.find("snapshot_stride"), "snapshot_stride must be >= 1");
    if (!(cfg.run.drift_gate > 0.0)) run.error(run.find("drift_gate"), "drift_gate must be positive");

    Section data(subtable(root, "data"), "data", source, errors);
    data.read("profile", cfg.data.profile);
    data.read("amplitude", cfg.data.amplitude);
    data.read("R0", cfg.data.R0);
    data.read("velocity_amplitude", cfg.data.velocity_amplitude);
    data.reject_unknown();
    if (cfg.data.profile != "bump") data.error(data.find("profile"), "only the 'bump' profile is available");
    if (!(cfg.data.R0 > 0.0)) data.error(data.find("R0"), "R0 must be positive");
    if (!std::isfinite(cfg.data.amplitude) || !std::isfinite(cfg.data.velocity_amplitude))
        data.error(nullptr, "amplitudes must be finite");

    Section sweep(subtable(root, "sweep"), "sweep", source, errors);
    sweep.read("n_list", cfg.sweep.n_list, true);
    sweep.read("cells_per_support", cfg.sweep.cells_per_support);
    sweep.read("refine_check", cfg.sweep.refine_check);
    sweep.read("drift_gate", cfg.sweep.drift_gate);
    sweep.reject_unknown();
    if (sweep.present()) {
        if (cfg.sweep.n_list.empty()) sweep.error(sweep.find("n_list"), "n_list must not be empty");
        for (std::size_t i = 0; i < cfg.sweep.n_list.size(); ++i) {
            if (cfg.sweep.n_list[i] < 1) sweep.error(sweep.find("n_list"), "n_list entries must be >= 1");
            if (i > 0 && cfg.sweep.n_list[i] <= cfg.sweep.n_list[i - 1])
                sweep.error(sweep.find("n_list"), "n_list must be strictly increasing");
        }
        if (cfg.sweep.cells_per_support < 16)
            sweep.error(sweep.find("cells_per_support"), "cells_per_support must be >= 16");
        if (!(cfg.sweep.drift_gate > 0.0)) sweep.error(sweep.find("drift_gate"), "drift_gate must be positive");
    }

    Section ineq(subtable(root, "inequalities"), "inequalities", source, errors);
    auto& iq = cfg.inequalities;
    ineq.read("dr", iq.dr);
    ineq.read("strauss_corpus", iq.strauss_corpus);
    ineq.read("gn_cases", iq.gn_cases);
    ineq.read("mt_beta", iq.mt_beta);
    ineq.read("mt_alpha_fraction", iq.mt_alpha_fraction);
    ineq.read("moser_beta", iq.moser_beta);
    ineq.read("moser_eps_fraction", iq.moser_eps_fraction);
    ineq.read("moser_n", iq.moser_n);
    ineq.read("k_alpha", iq.k_alpha);
    ineq.read("tech2d_b", iq.tech2d_b);
    ineq.read("tech2d_alpha", iq.tech2d_alpha);
    ineq.reject_unknown();
    if (!(iq.dr > 0.0) || iq.dr > 0.05) ineq.error(ineq.find("dr"), "dr must lie in (0, 0.05]");
    if (iq.strauss_corpus < 1) ineq.error(ineq.find("strauss_corpus"), "strauss_corpus must be >= 1");
    for (double b : iq.mt_beta)
        if (!(b >= 0.0 && b < 2.0)) ineq.error(ineq.find("mt_beta"), "beta values must lie in [0, 2)");
    for (double b : iq.moser_beta)
        if (!(b >= 0.0 && b < 2.0)) ineq.error(ineq.find("moser_beta"), "beta values must lie in [0, 2)");
    for (int n : iq.moser_n)
        if (n < 2) ineq.error(ineq.find("moser_n"), "Moser indices must be >= 2");
    for (double a : iq.k_alpha)
        if (!(a > 0.0)) ineq.error(ineq.find("k_alpha"), "alpha values must be positive");
    for (double e : iq.moser_eps_fraction)
        if (!(e >= 0.0)) ineq.error(ineq.find("moser_eps_fraction"), "eps fractions must be >= 0");
    for (const auto& c : iq.gn_cases)
        if (c[0] != 2.0 && c[0] != 3.0) ineq.error(ineq.find("gn_cases"), "gn case dimension must be 2 or 3");

    // Blocks each command needs.
    switch (cfg.command) {
        case Command::Validate: require_block(model, "model", cfg.command, errors); break;
        case Command::Simulate:
            require_block(model, "model", cfg.command, errors);
            require_block(run, "run", cfg.command, errors);
            require_block(data, "data", cfg.command, errors);
            require_block(grid, "grid", cfg.command, errors);
            if (grid.present() && !cfg.grid.num_cells && !cfg.grid.dr)
                grid.error(nullptr, "simulate needs num_cells or dr");
            break;
        case Command::Linearize:
            require_block(model, "model", cfg.command, errors);
            require_block(run, "run", cfg.command, errors);
            require_block(data, "data", cfg.command, errors);
            require_block(sweep, "sweep", cfg.command, errors);
            break;
        case Command::Inequalities: break;
    }

    const bool simulates = cfg.command == Command::Simulate || cfg.command == Command::Linearize;
    if (simulates && model.present() && !cfg.allow_outside_theorems && errors.empty()) {
        for (const auto& v : validate_hypotheses(cfg.model))
            errors.push_back(source + ": [model] outside " + v.theorem + ": " + v.detail +
                             " (set allow_outside_theorems = true to run anyway)");
    }

    if (!errors.empty()) throw ConfigError(std::move(errors));
    return cfg;
}

ExperimentConfig ingest(const std::filesystem::path& path, std::optional<Command> command) {
    std::ifstream in(path);
    if (!in) throw ConfigError({path.string() + ": cannot open config file"});
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.string(), command);
}

namespace {

std::string num(double x) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    std::string s(buf, end);
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

template <class T, class F>
std::string list(const std::vector<T>& v, F&& fmt) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
    return s + "]";
}

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string serialize(const ExperimentConfig& c) {
    auto integer = [](auto x) { return std::to_string(x); };
    std::ostringstream os;
    os << "command = " << quoted(std::string(to_string(c.command))) << '\n';
    os << "allow_outside_theorems = " << (c.allow_outside_theorems ? "true" : "false") << '\n';
    if (c.output_dir) os << "output_dir = " << quoted(*c.output_dir) << '\n';

    os << "\n[model]\n";
    os << "dim = " << c.model.dim << '\n';
    os << "kind = " << quoted(std::string(to_string(c.model.kind))) << '\n';
    os << "b = " << num(c.model.b) << '\n';
    if (c.model.kind == NonlinearityKind::Power3D) os << "p = " << num(c.model.p) << '\n';
    os << "mass = " << num(c.model.mass) << '\n';

    os << "\n[grid]\n";
    if (c.grid.r_max) os << "r_max = " << num(*c.grid.r_max) << '\n';
    if (c.grid.num_cells) os << "num_cells = " << *c.grid.num_cells << '\n';
    if (c.grid.dr) os << "dr = " << num(*c.grid.dr) << '\n';

    os << "\n[run]\n";
    os << "T = " << num(c.run.T) << '\n';
    os << "cfl = " << num(c.run.cfl) << '\n';
    os << "snapshot_stride = " << c.run.snapshot_stride << '\n';
    os << "drift_gate = " << num(c.run.drift_gate) << '\n';

    os << "\n[data]\n";
    os << "profile = " << quoted(c.data.profile) << '\n';
    os << "amplitude = " << num(c.data.amplitude) << '\n';
    os << "R0 = " << num(c.data.R0) << '\n';
    os << "velocity_amplitude = " << num(c.data.velocity_amplitude) << '\n';

    // A [sweep] block without n_list would not parse back.
    if (!c.sweep.n_list.empty()) {
        os << "\n[sweep]\n";
        os << "n_list = " << list(c.sweep.n_list, integer) << '\n';
        os << "cells_per_support = " << c.sweep.cells_per_support << '\n';
        os << "refine_check = " << (c.sweep.refine_check ? "true" : "false") << '\n';
        os << "drift_gate = " << num(c.sweep.drift_gate) << '\n';
    }

    const auto& iq = c.inequalities;
    os << "\n[inequalities]\n";
    os << "dr = " << num(iq.dr) << '\n';
    os << "strauss_corpus = " << iq.strauss_corpus << '\n';
    os << "gn_cases = " << list(iq.gn_cases, [](const std::array<double, 3>& t) {
        return "[" + num(t[0]) + ", " + num(t[1]) + ", " + num(t[2]) + "]";
    }) << '\n';
    os << "mt_beta = " << list(iq.mt_beta, num) << '\n';
    os << "mt_alpha_fraction = " << num(iq.mt_alpha_fraction) << '\n';
    os << "moser_beta = " << list(iq.moser_beta, num) << '\n';
    os << "moser_eps_fraction = " << list(iq.moser_eps_fraction, num) << '\n';
    os << "moser_n = " << list(iq.moser_n, integer) << '\n';
    os << "k_alpha = " << list(iq.k_alpha, num) << '\n';
    os << "tech2d_b = " << num(iq.tech2d_b) << '\n';
    os << "tech2d_alpha = " << num(iq.tech2d_alpha) << '\n';
    return os.str();
}

}  // namespace radwave
