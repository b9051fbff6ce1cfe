#include "fpgm/bench/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include <boost/algorithm/string/trim.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace fpgm::bench {

namespace pt = boost::property_tree;

namespace {

std::string trim(std::string s) {
    boost::algorithm::trim(s);
    return s;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string cur;
    int depth = 0;
    for (char c : text) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == sep && depth == 0) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
    return out;
}

double parse_real(const std::string& s) {
    const std::string t = trim(s);
    if (t == "inf" || t == "infinity") return kInfinity;
    std::size_t pos = 0;
    const double v = std::stod(t, &pos);
    if (pos != t.size()) throw std::invalid_argument("trailing characters");
    return v;
}

long parse_phase(const std::string& s) {
    const std::string t = trim(s);
    if (t == "inf" || t == "infinity") return kUnboundedPhase;
    std::size_t pos = 0;
    const long v = std::stol(t, &pos);
    if (pos != t.size() || v < 0) throw std::invalid_argument("bad phase length");
    return v;
}

std::string format_real(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string format_phase(long K) { return K == kUnboundedPhase ? "inf" : std::to_string(K); }

bool parse_bool(const std::string& s) {
    const std::string t = trim(s);
    if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
    if (t == "false" || t == "0" || t == "no" || t == "off") return false;
    throw std::invalid_argument("expected a boolean");
}

// Map "section.key" to its 1-based line in the source text, for messages.
std::map<std::string, int> key_lines(const std::string& text) {
    std::map<std::string, int> out;
    std::istringstream in(text);
    std::string line, section;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        const std::string t = trim(line);
        if (t.empty() || t[0] == ';' || t[0] == '#') continue;
        if (t.front() == '[' && t.back() == ']') {
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        const auto eq = t.find('=');
        if (eq != std::string::npos) out.emplace(section + "." + trim(t.substr(0, eq)), n);
    }
    return out;
}

std::string lesions_to_text(const std::vector<LesionSlot>& v) {
    std::string s;
    for (const auto& l : v) {
        if (!s.empty()) s += "; ";
        s += format_real(l.cx) + " " + format_real(l.cy) + " " + format_real(l.radius) + " " +
             format_real(l.delta);
    }
    return s;
}

std::string features_to_text(const std::vector<EllipseFeature>& v) {
    std::string s;
    for (const auto& e : v) {
        if (!s.empty()) s += "; ";
        s += format_real(e.cx) + " " + format_real(e.cy) + " " + format_real(e.a) + " " +
             format_real(e.b) + " " + format_real(e.angle) + " " + format_real(e.value);
    }
    return s;
}

std::vector<std::vector<double>> parse_tuples(const std::string& text, std::size_t arity) {
    std::vector<std::vector<double>> out;
    for (const auto& item : split(text, ';')) {
        if (item.empty()) continue;
        std::istringstream in(item);
        std::vector<double> vals;
        std::string tok;
        while (in >> tok) vals.push_back(parse_real(tok));
        if (vals.size() != arity)
            throw std::invalid_argument("expected " + std::to_string(arity) + " numbers per entry");
        out.push_back(std::move(vals));
    }
    return out;
}

std::string sides_to_text(LesionSides s) {
    switch (s) {
    case LesionSides::random: return "random";
    case LesionSides::left: return "left";
    case LesionSides::right: return "right";
    }
    return "random";
}

LesionSides parse_sides(const std::string& s) {
    const std::string t = trim(s);
    if (t == "random") return LesionSides::random;
    if (t == "left") return LesionSides::left;
    if (t == "right") return LesionSides::right;
    throw std::invalid_argument("expected random, left or right");
}

std::string reals_to_text(const Vec& v) {
    std::string s;
    for (double x : v) s += (s.empty() ? "" : ", ") + format_real(x);
    return s;
}

Vec parse_reals(const std::string& text) {
    Vec out;
    for (const auto& tok : split(text, ','))
        if (!tok.empty()) out.push_back(parse_real(tok));
    return out;
}

std::string methods_to_text(const std::vector<MethodSpec>& v) {
    std::string s;
    for (const auto& m : v) s += (s.empty() ? "" : ", ") + m.display();
    return s;
}

// Key table: each entry reads and writes one field as text.
struct Field {
    std::function<void(Config&, const std::string&)> set;
    std::function<std::string(const Config&)> get;
};

template <class T>
Field size_field(T Config::*sect, std::size_t T::*member) {
    return {[=](Config& c, const std::string& v) {
                std::size_t pos = 0;
                const long long n = std::stoll(trim(v), &pos);
                if (pos != trim(v).size() || n < 0) throw std::invalid_argument("expected a count");
                (c.*sect).*member = static_cast<std::size_t>(n);
            },
            [=](const Config& c) { return std::to_string((c.*sect).*member); }};
}

template <class T>
Field int_field(T Config::*sect, int T::*member) {
    return {[=](Config& c, const std::string& v) {
                std::size_t pos = 0;
                const int n = std::stoi(trim(v), &pos);
                if (pos != trim(v).size()) throw std::invalid_argument("expected an integer");
                (c.*sect).*member = n;
            },
            [=](const Config& c) { return std::to_string((c.*sect).*member); }};
}

template <class T>
Field real_field(T Config::*sect, double T::*member) {
    return {[=](Config& c, const std::string& v) { (c.*sect).*member = parse_real(v); },
            [=](const Config& c) { return format_real((c.*sect).*member); }};
}

template <class T>
Field bool_field(T Config::*sect, bool T::*member) {
    return {[=](Config& c, const std::string& v) { (c.*sect).*member = parse_bool(v); },
            [=](const Config& c) { return std::string((c.*sect).*member ? "true" : "false"); }};
}

template <class T>
Field seed_field(T Config::*sect, std::uint64_t T::*member) {
    return {[=](Config& c, const std::string& v) {
                std::size_t pos = 0;
                const auto n = std::stoull(trim(v), &pos);
                if (pos != trim(v).size()) throw std::invalid_argument("expected a seed");
                (c.*sect).*member = n;
            },
            [=](const Config& c) { return std::to_string((c.*sect).*member); }};
}

using FieldTable = std::vector<std::pair<std::string, Field>>;

const FieldTable& fields() {
    static const FieldTable table = [] {
        using C = Config;
        FieldTable t;
        t.emplace_back("geometry.views", size_field(&C::geometry, &GeometryConfig::views));
        t.emplace_back("geometry.rays_per_view",
                       size_field(&C::geometry, &GeometryConfig::rays_per_view));
        t.emplace_back("geometry.n_side", size_field(&C::geometry, &GeometryConfig::n_side));
        t.emplace_back("geometry.extent", real_field(&C::geometry, &GeometryConfig::extent));

        t.emplace_back("phantom.skull_cx", real_field(&C::phantom, &PhantomSpec::skull_cx));
        t.emplace_back("phantom.skull_cy", real_field(&C::phantom, &PhantomSpec::skull_cy));
        t.emplace_back("phantom.skull_inner_radius",
                       real_field(&C::phantom, &PhantomSpec::skull_inner_radius));
        t.emplace_back("phantom.skull_outer_radius",
                       real_field(&C::phantom, &PhantomSpec::skull_outer_radius));
        t.emplace_back("phantom.skull_value", real_field(&C::phantom, &PhantomSpec::skull_value));
        t.emplace_back("phantom.interior_value",
                       real_field(&C::phantom, &PhantomSpec::interior_value));
        t.emplace_back("phantom.inhomogeneity",
                       real_field(&C::phantom, &PhantomSpec::inhomogeneity));
        t.emplace_back("phantom.inhomogeneity_order",
                       int_field(&C::phantom, &PhantomSpec::inhomogeneity_order));
        t.emplace_back("phantom.supersample", int_field(&C::phantom, &PhantomSpec::supersample));
        t.emplace_back("phantom.sides",
                       Field{[](C& c, const std::string& v) { c.phantom.sides = parse_sides(v); },
                             [](const C& c) { return sides_to_text(c.phantom.sides); }});
        t.emplace_back("phantom.lesions",
                       Field{[](C& c, const std::string& v) {
                                 c.phantom.lesions.clear();
                                 for (const auto& e : parse_tuples(v, 4))
                                     c.phantom.lesions.push_back({e[0], e[1], e[2], e[3]});
                             },
                             [](const C& c) { return lesions_to_text(c.phantom.lesions); }});
        t.emplace_back("phantom.features",
                       Field{[](C& c, const std::string& v) {
                                 c.phantom.features.clear();
                                 for (const auto& e : parse_tuples(v, 6))
                                     c.phantom.features.push_back({e[0], e[1], e[2], e[3], e[4], e[5]});
                             },
                             [](const C& c) { return features_to_text(c.phantom.features); }});

        t.emplace_back("acquisition.flat", real_field(&C::acquisition, &AcquisitionConfig::flat));
        t.emplace_back("acquisition.dark", real_field(&C::acquisition, &AcquisitionConfig::dark));
        t.emplace_back("acquisition.seed", seed_field(&C::acquisition, &AcquisitionConfig::seed));
        t.emplace_back("acquisition.noiseless",
                       bool_field(&C::acquisition, &AcquisitionConfig::noiseless));

        t.emplace_back("reconstruct.algorithm",
                       Field{[](C& c, const std::string& v) {
                                 const std::string a = trim(v);
                                 if (a != "supart") (void)parse_variant(a);
                                 c.reconstruct.algorithm = a;
                             },
                             [](const C& c) { return c.reconstruct.algorithm; }});
        t.emplace_back("reconstruct.model",
                       Field{[](C& c, const std::string& v) { c.reconstruct.model = parse_model(v); },
                             [](const C& c) { return to_string(c.reconstruct.model); }});
        t.emplace_back("reconstruct.lambda", real_field(&C::reconstruct, &ReconstructConfig::lambda));
        t.emplace_back("reconstruct.t1", Field{[](C& c, const std::string& v) { c.reconstruct.solver.t1 = parse_real(v); },
                                               [](const C& c) { return format_real(c.reconstruct.solver.t1); }});
        t.emplace_back("reconstruct.L0", Field{[](C& c, const std::string& v) { c.reconstruct.solver.L0 = parse_real(v); },
                                               [](const C& c) { return format_real(c.reconstruct.solver.L0); }});
        t.emplace_back("reconstruct.beta", Field{[](C& c, const std::string& v) { c.reconstruct.solver.beta = parse_real(v); },
                                                 [](const C& c) { return format_real(c.reconstruct.solver.beta); }});
        t.emplace_back("reconstruct.K", Field{[](C& c, const std::string& v) { c.reconstruct.solver.K = parse_phase(v); },
                                              [](const C& c) { return format_phase(c.reconstruct.solver.K); }});
        t.emplace_back("reconstruct.eta_bar", Field{[](C& c, const std::string& v) { c.reconstruct.solver.eta_bar = parse_real(v); },
                                                    [](const C& c) { return format_real(c.reconstruct.solver.eta_bar); }});
        t.emplace_back("reconstruct.N", Field{[](C& c, const std::string& v) { c.reconstruct.solver.N = std::stoi(trim(v)); },
                                              [](const C& c) { return std::to_string(c.reconstruct.solver.N); }});
        t.emplace_back("reconstruct.skip_delta_c", Field{[](C& c, const std::string& v) { c.reconstruct.solver.skip_delta_c = parse_bool(v); },
                                                         [](const C& c) { return std::string(c.reconstruct.solver.skip_delta_c ? "true" : "false"); }});
        t.emplace_back("reconstruct.tv_inner_iters",
                       int_field(&C::reconstruct, &ReconstructConfig::tv_inner_iters));
        t.emplace_back("reconstruct.tv_warm_start",
                       bool_field(&C::reconstruct, &ReconstructConfig::tv_warm_start));
        t.emplace_back("reconstruct.alpha", Field{[](C& c, const std::string& v) { c.reconstruct.supart.alpha = parse_real(v); },
                                                  [](const C& c) { return format_real(c.reconstruct.supart.alpha); }});
        t.emplace_back("reconstruct.a", Field{[](C& c, const std::string& v) { c.reconstruct.supart.suptv.a = parse_real(v); },
                                              [](const C& c) { return format_real(c.reconstruct.supart.suptv.a); }});
        t.emplace_back("reconstruct.b", Field{[](C& c, const std::string& v) { c.reconstruct.supart.suptv.b = parse_real(v); },
                                              [](const C& c) { return format_real(c.reconstruct.supart.suptv.b); }});
        t.emplace_back("reconstruct.I", Field{[](C& c, const std::string& v) { c.reconstruct.supart.suptv.I = std::stoi(trim(v)); },
                                              [](const C& c) { return std::to_string(c.reconstruct.supart.suptv.I); }});
        t.emplace_back("reconstruct.max_sweeps", Field{[](C& c, const std::string& v) { c.reconstruct.supart.max_sweeps = std::stol(trim(v)); },
                                                       [](const C& c) { return std::to_string(c.reconstruct.supart.max_sweeps); }});
        t.emplace_back("reconstruct.epsilon", real_field(&C::reconstruct, &ReconstructConfig::epsilon));

        t.emplace_back("benchmark.model",
                       Field{[](C& c, const std::string& v) { c.benchmark.model = parse_model(v); },
                             [](const C& c) { return to_string(c.benchmark.model); }});
        t.emplace_back("benchmark.lambda", real_field(&C::benchmark, &BenchmarkConfig::lambda));
        t.emplace_back("benchmark.methods",
                       Field{[](C& c, const std::string& v) { c.benchmark.methods = parse_method_list(v); },
                             [](const C& c) { return methods_to_text(c.benchmark.methods); }});
        t.emplace_back("benchmark.L0",
                       Field{[](C& c, const std::string& v) { c.benchmark.L0 = parse_reals(v); },
                             [](const C& c) { return reals_to_text(c.benchmark.L0); }});
        t.emplace_back("benchmark.N", int_field(&C::benchmark, &BenchmarkConfig::N));
        t.emplace_back("benchmark.reference_multiplier",
                       int_field(&C::benchmark, &BenchmarkConfig::reference_multiplier));
        t.emplace_back("benchmark.reference_L0",
                       real_field(&C::benchmark, &BenchmarkConfig::reference_L0));

        t.emplace_back("study.seeds", int_field(&C::study, &StudyConfig::seeds));
        t.emplace_back("study.first_seed", seed_field(&C::study, &StudyConfig::first_seed));
        t.emplace_back("study.lambdas",
                       Field{[](C& c, const std::string& v) { c.study.lambdas = parse_reals(v); },
                             [](const C& c) { return reals_to_text(c.study.lambdas); }});
        t.emplace_back("study.calibration_lambda",
                       real_field(&C::study, &StudyConfig::calibration_lambda));
        t.emplace_back("study.epsilon",
                       Field{[](C& c, const std::string& v) {
                                 if (trim(v) == "auto") {
                                     c.study.epsilon_auto = true;
                                 } else {
                                     c.study.epsilon_auto = false;
                                     c.study.epsilon = parse_real(v);
                                 }
                             },
                             [](const C& c) {
                                 return c.study.epsilon_auto ? std::string("auto")
                                                             : format_real(c.study.epsilon);
                             }});
        t.emplace_back("study.N", int_field(&C::study, &StudyConfig::N));
        t.emplace_back("study.L0", real_field(&C::study, &StudyConfig::L0));
        return t;
    }();
    return table;
}

void check(const Config& c, const std::string& origin) {
    auto fail = [&](const std::string& msg) { throw ConfigError(origin + ": " + msg); };
    const auto& g = c.geometry;
    if (g.views < 2 || g.rays_per_view < 2) fail("geometry needs at least 2 views and 2 rays");
    if (g.n_side < 1 || !(g.extent > 0.0)) fail("geometry needs a nonempty grid and positive extent");
    if (!(c.acquisition.dark >= 0.0) || !(c.acquisition.flat > c.acquisition.dark))
        fail("acquisition needs flat > dark >= 0");
    if (!(c.reconstruct.lambda >= 0.0) || !(c.benchmark.lambda >= 0.0))
        fail("lambda must be nonnegative");
    if (c.reconstruct.tv_inner_iters < 1) fail("tv_inner_iters must be positive");
    if (c.benchmark.L0.empty()) fail("benchmark.L0 is empty");
    if (c.benchmark.methods.empty()) fail("benchmark.methods is empty");
    if (c.benchmark.N < 1 || c.benchmark.reference_multiplier < 1)
        fail("benchmark.N and reference_multiplier must be positive");
    if (c.study.seeds < 2) fail("study.seeds must be at least 2");
    if (c.study.lambdas.empty()) fail("study.lambdas is empty");
    if (c.study.N < 1 || !(c.study.L0 > 0.0)) fail("study.N and study.L0 must be positive");
    if (!c.study.epsilon_auto && !(c.study.epsilon > 0.0)) fail("study.epsilon must be positive");
    if (!(c.reconstruct.epsilon > 0.0)) fail("reconstruct.epsilon must be positive");
    try {
        SolverConfig s = c.reconstruct.solver;
        s.validate();
        if (!(c.reconstruct.supart.alpha > 0.0 && c.reconstruct.supart.alpha < 2.0))
            fail("reconstruct.alpha must lie in (0, 2)");
    } catch (const ContractError& e) {
        fail(e.what());
    }
}

} // namespace

Scale parse_scale(const std::string& s) {
    if (s == "desk") return Scale::desk;
    if (s == "paper") return Scale::paper;
    throw ConfigError("unknown scale '" + s + "' (expected desk or paper)");
}

std::string MethodSpec::label() const {
    std::string s = to_string(variant);
    if (variant == Variant::fpgm || variant == Variant::mfpgm)
        s += "_" + format_phase(K) + "_" + format_real(eta_bar);
    return s;
}

std::string MethodSpec::display() const {
    std::string s = to_string(variant);
    if (variant == Variant::fpgm || variant == Variant::mfpgm)
        s += "(" + format_phase(K) + "," + format_real(eta_bar) + ")";
    return s;
}

MethodSpec parse_method(const std::string& token) {
    const std::string t = trim(token);
    MethodSpec m;
    const auto open = t.find('(');
    try {
        m.variant = parse_variant(trim(t.substr(0, open)));
    } catch (const ContractError& e) {
        throw ConfigError(e.what());
    }
    const bool adaptive = m.variant == Variant::fpgm || m.variant == Variant::mfpgm;
    if (open == std::string::npos) return m;
    if (!adaptive || t.back() != ')')
        throw ConfigError("method '" + t + "': only fpgm/mfpgm take (K,eta_bar)");
    const auto args = split(t.substr(open + 1, t.size() - open - 2), ',');
    if (args.size() != 2) throw ConfigError("method '" + t + "': expected (K,eta_bar)");
    try {
        m.K = parse_phase(args[0]);
        m.eta_bar = parse_real(args[1]);
    } catch (const std::exception&) {
        throw ConfigError("method '" + t + "': malformed (K,eta_bar)");
    }
    if (!(m.eta_bar >= 1.0)) throw ConfigError("method '" + t + "': eta_bar must be >= 1");
    return m;
}

std::vector<MethodSpec> parse_method_list(const std::string& text) {
    std::vector<MethodSpec> out;
    for (const auto& tok : split(text, ','))
        if (!tok.empty()) out.push_back(parse_method(tok));
    return out;
}

std::string to_string(Model m) {
    return m == Model::transmission_nonneg ? "transmission_nonneg" : "ls_tv";
}

Model parse_model(const std::string& s) {
    const std::string t = trim(s);
    if (t == "transmission_nonneg") return Model::transmission_nonneg;
    if (t == "ls_tv") return Model::ls_tv;
    throw std::invalid_argument("expected transmission_nonneg or ls_tv");
}

Config default_config(Scale scale) {
    Config c;
    c.scale = scale;
    c.phantom = PhantomSpec::desk_default();
    c.benchmark.methods = parse_method_list("fista, fpgm(10,inf), mfpgm(10,inf), fpgm(inf,inf)");
    c.benchmark.L0 = {1e2, 1e3, 1e4};
    c.reconstruct.solver.N = 100;
    if (scale == Scale::paper) {
        c.geometry = {512, 2048, 2048, 9.1};
        c.benchmark.L0 = {1.0 / 2e-4, 1.0 / 1.5e-4, 1.0 / 9e-5};
        c.study.seeds = 30;
        c.study.epsilon_auto = false;
        c.study.epsilon = 2.33;
    }
    c.phantom.n_side = c.geometry.n_side;
    c.phantom.extent = c.geometry.extent;
    return c;
}

Config parse_config(const std::string& text, Scale scale, const std::string& origin) {
    Config c = default_config(scale);
    pt::ptree tree;
    try {
        std::istringstream in(text);
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(origin + " line " + std::to_string(e.line()) + ": " + e.message());
    }
    const auto lines = key_lines(text);
    auto where = [&](const std::string& key) {
        const auto it = lines.find(key);
        return origin + (it == lines.end() ? "" : " line " + std::to_string(it->second));
    };
    std::set<std::string> sections;
    for (const auto& [name, f] : fields()) sections.insert(name.substr(0, name.find('.')));

    for (const auto& [section, body] : tree) {
        if (!sections.count(section))
            throw ConfigError(origin + ": unknown section [" + section + "]");
        for (const auto& [key, node] : body) {
            const std::string full = section + "." + key;
            const auto it = std::find_if(fields().begin(), fields().end(),
                                         [&](const auto& f) { return f.first == full; });
            if (it == fields().end()) throw ConfigError(where(full) + ": unknown key '" + full + "'");
            const std::string value = node.get_value<std::string>();
            try {
                it->second.set(c, value);
            } catch (const ConfigError& e) {
                throw ConfigError(where(full) + ": " + e.what());
            } catch (const std::exception& e) {
                throw ConfigError(where(full) + ": bad value '" + value + "' for " + full + " (" +
                                  e.what() + ")");
            }
        }
    }
    c.phantom.n_side = c.geometry.n_side;
    c.phantom.extent = c.geometry.extent;
    check(c, origin);
    return c;
}

Config load_config(const std::filesystem::path& path, Scale scale) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), scale, path.string());
}

std::string dump_config(const Config& c) {
    std::string out, section;
    for (const auto& [name, f] : fields()) {
        const std::string s = name.substr(0, name.find('.'));
        if (s != section) {
            out += (out.empty() ? "[" : "\n[") + s + "]\n";
            section = s;
        }
        out += name.substr(name.find('.') + 1) + " = " + f.get(c) + "\n";
    }
    return out;
}

} // namespace fpgm::bench
