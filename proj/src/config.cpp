#include "sscmg/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

namespace sscmg {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream is(s);
    std::vector<std::string> out;
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

int parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const int v = std::stoi(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' needs an integer, got '" + value + "'");
    }
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' needs a number, got '" + value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "1" || value == "true" || value == "yes") return true;
    if (value == "0" || value == "false" || value == "no") return false;
    throw ConfigError("config: key '" + key + "' needs a boolean, got '" + value + "'");
}

}  // namespace

ScheduleSpec parse_schedule_token(const std::string& token) {
    ScheduleSpec spec;
    std::string kind = token;
    int param = 1;
    if (const auto colon = token.find(':'); colon != std::string::npos) {
        kind = token.substr(0, colon);
        param = parse_int("schedule", token.substr(colon + 1));
    }
    if (kind == "constant") {
        spec.kind = ScheduleKind::constant;
        spec.m = param;
    } else if (kind == "decreasing") {
        spec.kind = ScheduleKind::decreasing;
    } else if (kind == "increasing") {
        spec.kind = ScheduleKind::increasing;
    } else if (kind == "optimal") {
        spec.kind = ScheduleKind::optimal_quadratic;
        spec.q = param;
    } else {
        throw ConfigError("config: unknown schedule '" + token +
                          "' (use constant[:m] | decreasing | increasing | optimal[:q])");
    }
    return spec;
}

std::string schedule_name(const ScheduleSpec& spec) {
    switch (spec.kind) {
        case ScheduleKind::constant: return "constant:" + std::to_string(spec.m);
        case ScheduleKind::decreasing: return "decreasing";
        case ScheduleKind::increasing: return "increasing";
        case ScheduleKind::optimal_quadratic: return "optimal:" + std::to_string(spec.q);
    }
    return "?";
}

std::string application_name(Application app) {
    switch (app) {
        case Application::uniform: return "uniform";
        case Application::local_nested: return "local_nested";
        case Application::local_nonnested: return "local_nonnested";
    }
    return "?";
}

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig config;
    std::istringstream is(text);
    std::string line;
    std::string section;
    std::map<int, std::vector<int>> explicit_regions;

    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const std::string stripped = trim(line.substr(0, line.find('#')));
        if (stripped.empty()) continue;
        if (stripped.front() == '[') {
            if (stripped.back() != ']')
                throw ConfigError("config line " + std::to_string(line_no) + ": bad section");
            section = stripped.substr(1, stripped.size() - 2);
            continue;
        }
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        const std::string qualified = section.empty() ? key : section + "." + key;

        if (qualified == "problem.application") {
            if (value == "uniform") config.application = Application::uniform;
            else if (value == "local_nested") config.application = Application::local_nested;
            else if (value == "local_nonnested") config.application = Application::local_nonnested;
            else throw ConfigError("config: unknown application '" + value + "'");
        } else if (qualified == "problem.coarse_n") {
            config.coarse_n = parse_int(qualified, value);
        } else if (qualified == "problem.levels") {
            config.levels = parse_int(qualified, value);
        } else if (qualified == "problem.theta") {
            const auto parts = split_ws(value);
            if (parts.size() != 3)
                throw ConfigError("config: theta needs 3 entries 't11 t12 t22'");
            const double t11 = parse_double(qualified, parts[0]);
            const double t12 = parse_double(qualified, parts[1]);
            const double t22 = parse_double(qualified, parts[2]);
            config.theta << t11, t12, t12, t22;
        } else if (qualified == "problem.rhs") {
            if (value == "manufactured") config.rhs = RhsKind::manufactured;
            else if (value == "constant") config.rhs = RhsKind::constant;
            else if (value.rfind("file:", 0) == 0) {
                config.rhs = RhsKind::file;
                config.rhs_file = value.substr(5);
            } else throw ConfigError("config: rhs must be manufactured | constant | file:PATH");
        } else if (qualified == "subdomains.rows") {
            config.grid_rows = parse_int(qualified, value);
        } else if (qualified == "subdomains.cols") {
            config.grid_cols = parse_int(qualified, value);
        } else if (qualified == "refinement.corner_size") {
            config.region.corner_size = parse_double(qualified, value);
        } else if (qualified == "refinement.shrink") {
            config.region.shrink = parse_bool(qualified, value);
        } else if (section == "refinement" && key.rfind("region_", 0) == 0) {
            const int level = parse_int(key, key.substr(7));
            std::vector<int> elems;
            for (const auto& tok : split_ws(value)) elems.push_back(parse_int(key, tok));
            explicit_regions[level] = std::move(elems);
        } else if (qualified == "schedule.kind") {
            config.schedule = parse_schedule_token(value);
        } else if (qualified == "schedule.m") {
            config.schedule.m = parse_int(qualified, value);
        } else if (qualified == "schedule.q") {
            config.schedule.q = parse_int(qualified, value);
        } else if (qualified == "solve.rel_tol") {
            config.rel_tol = parse_double(qualified, value);
        } else if (qualified == "solve.max_cycles") {
            config.max_cycles = parse_int(qualified, value);
        } else if (qualified == "sweep.schedules") {
            config.sweep_schedules.clear();
            for (const auto& tok : split_ws(value))
                config.sweep_schedules.push_back(parse_schedule_token(tok));
        } else if (qualified == "sweep.j_min") {
            config.sweep_j_min = parse_int(qualified, value);
        } else if (qualified == "sweep.j_max") {
            config.sweep_j_max = parse_int(qualified, value);
        } else {
            throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" +
                              qualified + "'");
        }
    }

    if (!explicit_regions.empty()) {
        const int top = explicit_regions.rbegin()->first;
        config.region.explicit_sets.assign(top, {});
        for (const auto& [level, elems] : explicit_regions) {
            if (level < 1)
                throw ConfigError("config: region levels start at 1");
            config.region.explicit_sets[level - 1] = elems;
        }
        for (int k = 1; k <= top; ++k)
            if (config.region.explicit_sets[k - 1].empty())
                throw ConfigError("config: region_" + std::to_string(k) + " missing");
    }

    config.validate();
    return config;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buffer;
    buffer << is.rdbuf();
    return parse_config_text(buffer.str());
}

void ExperimentConfig::validate() const {
    if (coarse_n < 1) throw ConfigError("config: coarse_n must be >= 1");
    if (levels < 0) throw ConfigError("config: levels must be >= 0");
    if (grid_rows < 1 || grid_cols < 1) throw ConfigError("config: subdomain grid must be >= 1x1");
    if (application != Application::local_nested) {
        if (coarse_n % grid_cols != 0 || coarse_n % grid_rows != 0)
            throw ConfigError("config: subdomain grid " + std::to_string(grid_rows) + "x" +
                              std::to_string(grid_cols) +
                              " does not divide coarse_n (boundaries would cut coarse cells)");
    }
    if (!(rel_tol > 0.0 && rel_tol <= 1.0)) throw ConfigError("config: rel_tol must be in (0,1]");
    if (max_cycles < 1) throw ConfigError("config: max_cycles must be >= 1");
    if (schedule.kind == ScheduleKind::constant && schedule.m < 1)
        throw ConfigError("config: schedule m must be >= 1");
    if (schedule.kind == ScheduleKind::optimal_quadratic && schedule.q < 1)
        throw ConfigError("config: schedule q must be >= 1");
    if (region.corner_size <= 0.0 || region.corner_size > 1.0)
        throw ConfigError("config: corner_size must be in (0,1]");
    if (rhs == RhsKind::file && rhs_file.empty())
        throw ConfigError("config: rhs file path missing");
    if (sweep_j_min < 1 || sweep_j_max < sweep_j_min)
        throw ConfigError("config: sweep level range must satisfy 1 <= j_min <= j_max");
    if (dense_cap < 1) throw ConfigError("config: dense cap must be positive");
    try {
        CoefficientField check(theta);  // SPD validation
    } catch (const SpaceError& err) {
        throw ConfigError(std::string("config: ") + err.what());
    }
}

HierarchyConfig ExperimentConfig::hierarchy_config() const {
    return hierarchy_config(levels, schedule);
}

HierarchyConfig ExperimentConfig::hierarchy_config(int levels_override,
                                                   const ScheduleSpec& schedule_override) const {
    HierarchyConfig hc;
    hc.application = application;
    hc.coarse_n = coarse_n;
    hc.levels = levels_override;
    hc.grid_rows = grid_rows;
    hc.grid_cols = grid_cols;
    hc.schedule = schedule_override;
    hc.theta = theta;
    hc.region = region;
    return hc;
}

}  // namespace sscmg
