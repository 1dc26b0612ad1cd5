#include "fer/config.hpp"

#include <fstream>
#include <sstream>

#include "fer/csv.hpp"

namespace fer {

RunConfig default_config() {
    RunConfig cfg;
    cfg.model.gamma = 1.0;
    cfg.model.kappa = {0.0, 1.0};
    cfg.model.eta = EtaSpec::ou(0.1);
    cfg.model.c_eta = 0.1;
    cfg.model.theta = ThetaSpec::capped_linear(10.0);
    cfg.model.constraint = ConstraintSet::first_coordinate_line;
    cfg.payoff = PayoffSpec::put_like(10.0);
    cfg.v_min = -30.0;
    cfg.v_max = 30.0;
    return cfg;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& s, int line) {
    try {
        std::size_t used = 0;
        const double x = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument("");
        return x;
    } catch (const std::exception&) {
        throw ConfigError(line, "expected a number, got '" + s + "'");
    }
}

}  // namespace

RunConfig parse_config(std::istream& in) {
    RunConfig cfg = default_config();
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) throw ConfigError(line_no, "expected 'key = value'");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string val = trim(stripped.substr(eq + 1));
        if (key.empty() || val.empty()) throw ConfigError(line_no, "expected 'key = value'");

        if (key == "gamma") {
            cfg.model.gamma = parse_number(val, line_no);
        } else if (key == "kappa1") {
            cfg.model.kappa.x1 = parse_number(val, line_no);
        } else if (key == "kappa2") {
            cfg.model.kappa.x2 = parse_number(val, line_no);
        } else if (key == "eta.alpha") {
            cfg.model.eta.alpha = parse_number(val, line_no);
            cfg.model.c_eta = cfg.model.eta.alpha;
        } else if (key == "theta.kind") {
            if (val == "constant")
                cfg.model.theta.kind = ThetaSpec::Kind::constant;
            else if (val == "capped_linear")
                cfg.model.theta.kind = ThetaSpec::Kind::capped_linear;
            else
                throw ConfigError(line_no, "theta.kind must be constant or capped_linear");
        } else if (key == "theta.theta0") {
            cfg.model.theta.theta0 = parse_number(val, line_no);
        } else if (key == "theta.K2") {
            cfg.model.theta.K2 = parse_number(val, line_no);
        } else if (key == "payoff.kind") {
            if (val == "constant")
                cfg.payoff = PayoffSpec::constant(cfg.payoff.c);
            else if (val == "linear")
                cfg.payoff = PayoffSpec::linear();
            else if (val == "put_like")
                cfg.payoff = PayoffSpec::put_like(cfg.payoff.K1);
            else
                throw ConfigError(line_no, "payoff.kind must be constant, linear or put_like");
        } else if (key == "payoff.c") {
            cfg.payoff.c = parse_number(val, line_no);
        } else if (key == "payoff.K1") {
            cfg.payoff.K1 = parse_number(val, line_no);
        } else if (key == "constraint") {
            if (val == "full_space")
                cfg.model.constraint = ConstraintSet::full_space;
            else if (val == "first_coordinate_line")
                cfg.model.constraint = ConstraintSet::first_coordinate_line;
            else
                throw ConfigError(line_no, "constraint must be full_space or first_coordinate_line");
        } else if (key == "v_min") {
            cfg.v_min = parse_number(val, line_no);
        } else if (key == "v_max") {
            cfg.v_max = parse_number(val, line_no);
        } else {
            throw ConfigError(line_no, "unknown key '" + key + "'");
        }
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    return parse_config(in);
}

std::string serialize_config(const RunConfig& cfg) {
    std::ostringstream os;
    os << "gamma = " << csv::fmt(cfg.model.gamma) << '\n';
    os << "kappa1 = " << csv::fmt(cfg.model.kappa.x1) << '\n';
    os << "kappa2 = " << csv::fmt(cfg.model.kappa.x2) << '\n';
    os << "eta.alpha = " << csv::fmt(cfg.model.eta.alpha) << '\n';
    os << "theta.kind = "
       << (cfg.model.theta.kind == ThetaSpec::Kind::constant ? "constant" : "capped_linear")
       << '\n';
    os << "theta.theta0 = " << csv::fmt(cfg.model.theta.theta0) << '\n';
    os << "theta.K2 = " << csv::fmt(cfg.model.theta.K2) << '\n';
    switch (cfg.payoff.kind) {
        case PayoffSpec::Kind::constant: os << "payoff.kind = constant\n"; break;
        case PayoffSpec::Kind::linear: os << "payoff.kind = linear\n"; break;
        case PayoffSpec::Kind::put_like: os << "payoff.kind = put_like\n"; break;
    }
    os << "payoff.c = " << csv::fmt(cfg.payoff.c) << '\n';
    os << "payoff.K1 = " << csv::fmt(cfg.payoff.K1) << '\n';
    os << "constraint = "
       << (cfg.model.constraint == ConstraintSet::full_space ? "full_space"
                                                             : "first_coordinate_line")
       << '\n';
    os << "v_min = " << csv::fmt(cfg.v_min) << '\n';
    os << "v_max = " << csv::fmt(cfg.v_max) << '\n';
    return os.str();
}

}  // namespace fer
