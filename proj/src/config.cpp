#include "dsm/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

namespace dsm {
namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream is(s);
    std::vector<std::string> out;
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

double parse_real(const std::string& field, const std::string& s) {
    const std::string t = trim(s);
    if (t.empty()) throw ConfigError(field, "expected a number");
    char* end = nullptr;
    double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size()) throw ConfigError(field, "malformed number '" + t + "'");
    if (!std::isfinite(v)) throw ConfigError(field, "number must be finite");
    return v;
}

long long parse_int(const std::string& field, const std::string& s) {
    const std::string t = trim(s);
    if (t.empty()) throw ConfigError(field, "expected an integer");
    char* end = nullptr;
    long long v = std::strtoll(t.c_str(), &end, 10);
    if (end != t.c_str() + t.size()) throw ConfigError(field, "malformed integer '" + t + "'");
    return v;
}

std::uint64_t parse_u64(const std::string& field, const std::string& s) {
    const std::string t = trim(s);
    if (t.empty() || t[0] == '-') throw ConfigError(field, "expected an unsigned integer");
    char* end = nullptr;
    unsigned long long v = std::strtoull(t.c_str(), &end, 10);
    if (end != t.c_str() + t.size()) throw ConfigError(field, "malformed integer '" + t + "'");
    return v;
}

struct Section {
    std::string name;
    std::vector<std::pair<std::string, std::string>> entries;

    const std::string* find(const std::string& key) const {
        const std::string* hit = nullptr;
        for (const auto& [k, v] : entries)
            if (k == key) {
                if (hit) throw ConfigError(key, "duplicate key in section [" + name + "]");
                hit = &v;
            }
        return hit;
    }
    std::vector<std::string> all(const std::string& key) const {
        std::vector<std::string> out;
        for (const auto& [k, v] : entries)
            if (k == key) out.push_back(v);
        return out;
    }
};

std::vector<Section> tokenize(const std::string& text) {
    std::vector<Section> sections(1);
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(line, "unterminated section header");
            sections.push_back({trim(line.substr(1, line.size() - 2)), {}});
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(line, "expected 'key = value'");
        sections.back().entries.push_back({trim(line.substr(0, eq)), trim(line.substr(eq + 1))});
    }
    return sections;
}

std::vector<std::pair<int, int>> parse_edges(const std::string& field, const std::string& value,
                                             int n) {
    std::vector<std::pair<int, int>> edges;
    std::istringstream is(value);
    std::string tok;
    while (std::getline(is, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) continue;
        auto dash = tok.find('-');
        if (dash == std::string::npos) throw ConfigError(field, "edge '" + tok + "' must look like a-b");
        long long a = parse_int(field, tok.substr(0, dash));
        long long b = parse_int(field, tok.substr(dash + 1));
        if (a < 1 || a > n || b < 1 || b > n)
            throw ConfigError(field, "edge '" + tok + "' references a node outside 1.." + std::to_string(n));
        if (a == b) throw ConfigError(field, "self-edge '" + tok + "' is not allowed");
        edges.push_back({static_cast<int>(a - 1), static_cast<int>(b - 1)});
    }
    return edges;
}

ScheduleSpec parse_schedule(const Section& sec, int n) {
    const std::string* kind = sec.find("kind");
    if (!kind) throw ConfigError("schedule.kind", "missing");
    if (*kind == "static") {
        auto graphs = sec.all("graph");
        if (graphs.size() != 1) throw ConfigError("schedule.graph", "static schedule needs exactly one graph line");
        return StaticSpec{normalize_graph(n, parse_edges("schedule.graph", graphs[0], n))};
    }
    if (*kind == "cycle") {
        auto graphs = sec.all("graph");
        if (graphs.empty()) throw ConfigError("schedule.graph", "cycle schedule needs at least one graph line");
        CycleSpec spec;
        for (const auto& g : graphs)
            spec.phases.push_back(normalize_graph(n, parse_edges("schedule.graph", g, n)));
        return spec;
    }
    if (*kind == "random_connected") {
        const std::string* p = sec.find("p");
        if (!p) throw ConfigError("schedule.p", "missing");
        double pv = parse_real("schedule.p", *p);
        const std::string* b = sec.find("B");
        int bv = b ? static_cast<int>(parse_int("schedule.B", *b)) : 1;
        if (bv < 1) throw ConfigError("schedule.B", "window must be positive");
        return RandomConnectedSpec{n, pv, bv};
    }
    if (*kind == "matrix") {
        const std::string* eta = sec.find("eta");
        if (!eta) throw ConfigError("schedule.eta", "missing");
        double ev = parse_real("schedule.eta", *eta);
        const std::string* b = sec.find("B");
        int bv = b ? static_cast<int>(parse_int("schedule.B", *b)) : 1;
        if (bv < 1) throw ConfigError("schedule.B", "window must be positive");
        auto rows = sec.all("row");
        if (rows.empty() || rows.size() % static_cast<std::size_t>(n) != 0)
            throw ConfigError("schedule.row", "need a multiple of n row lines");
        MatrixSpec spec;
        spec.eta = ev;
        spec.window = bv;
        for (std::size_t base = 0; base < rows.size(); base += static_cast<std::size_t>(n)) {
            Matrix A(n, n);
            for (int i = 0; i < n; ++i) {
                auto toks = split_ws(rows[base + static_cast<std::size_t>(i)]);
                if (static_cast<int>(toks.size()) != n)
                    throw ConfigError("schedule.row", "row needs exactly n entries");
                for (int j = 0; j < n; ++j) A(i, j) = parse_real("schedule.row", toks[static_cast<std::size_t>(j)]);
            }
            spec.matrices.push_back(std::move(A));
        }
        return spec;
    }
    throw ConfigError("schedule.kind", "unknown kind '" + *kind + "'");
}

ObjectiveEntry parse_objective(const Section& sec, int m, const std::string& label) {
    const std::string* kind = sec.find("kind");
    if (!kind) throw ConfigError(label + ".kind", "missing");
    if (*kind == "max_affine") {
        auto pieces = sec.all("piece");
        if (pieces.empty()) throw ConfigError(label + ".piece", "max_affine needs at least one piece");
        MaxAffineEntry entry;
        for (const auto& p : pieces) {
            auto colon = p.find(':');
            if (colon == std::string::npos)
                throw ConfigError(label + ".piece", "piece must look like 'slope components : intercept'");
            auto toks = split_ws(p.substr(0, colon));
            if (static_cast<int>(toks.size()) != m)
                throw ConfigError(label + ".piece", "slope needs exactly m components");
            AffinePiece piece;
            for (const auto& t : toks) piece.slope.push_back(parse_real(label + ".piece", t));
            piece.intercept = parse_real(label + ".piece", p.substr(colon + 1));
            entry.pieces.push_back(std::move(piece));
        }
        return entry;
    }
    if (*kind == "abs_shift") {
        const std::string* shift = sec.find("shift");
        if (!shift) throw ConfigError(label + ".shift", "missing");
        auto toks = split_ws(*shift);
        if (static_cast<int>(toks.size()) != m)
            throw ConfigError(label + ".shift", "shift needs exactly m components");
        AbsShiftEntry entry;
        for (const auto& t : toks) entry.shift.push_back(parse_real(label + ".shift", t));
        return entry;
    }
    throw ConfigError(label + ".kind", "unknown kind '" + *kind + "'");
}

InitSpec parse_init(const Section& sec, const ExperimentConfig& cfg) {
    const std::string* kind = sec.find("kind");
    std::string k = kind ? *kind : "random";
    if (k == "random") return RandomInit{};
    if (k != "explicit") throw ConfigError("init.kind", "unknown kind '" + k + "'");
    ExplicitInit init;
    if (cfg.quantized()) {
        init.units.resize(static_cast<std::size_t>(cfg.n));
        for (int i = 1; i <= cfg.n; ++i) {
            const std::string* v = sec.find("units " + std::to_string(i));
            if (!v) throw ConfigError("init.units " + std::to_string(i), "missing (quantized runs take grid units)");
            auto toks = split_ws(*v);
            if (static_cast<int>(toks.size()) != cfg.m)
                throw ConfigError("init.units " + std::to_string(i), "needs exactly m components");
            for (const auto& t : toks)
                init.units[static_cast<std::size_t>(i - 1)].push_back(parse_int("init.units", t));
        }
    } else {
        init.x.resize(static_cast<std::size_t>(cfg.n));
        for (int i = 1; i <= cfg.n; ++i) {
            const std::string* v = sec.find("x " + std::to_string(i));
            if (!v) throw ConfigError("init.x " + std::to_string(i), "missing");
            auto toks = split_ws(*v);
            if (static_cast<int>(toks.size()) != cfg.m)
                throw ConfigError("init.x " + std::to_string(i), "needs exactly m components");
            for (const auto& t : toks)
                init.x[static_cast<std::size_t>(i - 1)].push_back(parse_real("init.x", t));
        }
    }
    return init;
}

}  // namespace

bool ExperimentConfig::quantized() const {
    return quantizer.has_value() && std::isfinite(*quantizer);
}

ExperimentConfig parse_config(const std::string& text) {
    auto sections = tokenize(text);
    ExperimentConfig cfg;

    const Section& top = sections.front();
    auto need = [&top](const char* key) -> const std::string& {
        const std::string* v = top.find(key);
        if (!v) throw ConfigError(key, "missing");
        return *v;
    };
    cfg.n = static_cast<int>(parse_int("n", need("n")));
    if (cfg.n < 1) throw ConfigError("n", "need at least one agent");
    cfg.m = static_cast<int>(parse_int("m", need("m")));
    if (cfg.m < 1) throw ConfigError("m", "dimension must be positive");
    cfg.alpha = parse_real("alpha", need("alpha"));
    if (!(cfg.alpha > 0.0)) throw ConfigError("alpha", "stepsize must be positive");
    cfg.k_max = parse_int("k_max", need("k_max"));
    if (cfg.k_max < 1) throw ConfigError("k_max", "need at least one step");
    if (const std::string* seed = top.find("seed")) cfg.seed = parse_u64("seed", *seed);
    const std::string& mode = need("mode");
    if (mode == "run") cfg.mode = Mode::Run;
    else if (mode == "verify") cfg.mode = Mode::Verify;
    else throw ConfigError("mode", "expected run or verify");
    if (const std::string* q = top.find("quantizer")) {
        if (*q == "inf") {
            cfg.quantizer = std::numeric_limits<double>::infinity();
        } else {
            long long qv = parse_int("quantizer", *q);
            if (qv < 1) throw ConfigError("quantizer", "Q must be at least 1");
            cfg.quantizer = static_cast<double>(qv);
        }
    }

    const Section* schedule = nullptr;
    const Section* init = nullptr;
    std::vector<const Section*> objectives;
    for (std::size_t s = 1; s < sections.size(); ++s) {
        const auto& sec = sections[s];
        if (sec.name == "schedule") {
            if (schedule) throw ConfigError("schedule", "duplicate section");
            schedule = &sec;
        } else if (sec.name == "init") {
            if (init) throw ConfigError("init", "duplicate section");
            init = &sec;
        } else if (sec.name.rfind("objective", 0) == 0) {
            long long idx = parse_int("objective", trim(sec.name.substr(9)));
            if (idx != static_cast<long long>(objectives.size()) + 1)
                throw ConfigError("objective", "sections must be numbered 1..n in order");
            objectives.push_back(&sec);
        } else {
            throw ConfigError(sec.name, "unknown section");
        }
    }
    if (!schedule) throw ConfigError("schedule", "missing section");
    if (objectives.empty()) throw ConfigError("objective", "need at least one objective section");
    if (static_cast<int>(objectives.size()) > cfg.n)
        throw ConfigError("objective", "more objective sections than agents");

    cfg.schedule = parse_schedule(*schedule, cfg.n);
    for (std::size_t i = 0; i < objectives.size(); ++i)
        cfg.objectives.push_back(
            parse_objective(*objectives[i], cfg.m, "objective " + std::to_string(i + 1)));
    cfg.init = init ? parse_init(*init, cfg) : InitSpec{RandomInit{}};
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace dsm
