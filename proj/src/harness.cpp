#include "clocksync/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "clocksync/errors.hpp"

namespace clocksync {

using nlohmann::json;

// ---------------------------------------------------------------- config

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorCode::IoError, "cannot write " + path);
    out << text;
    if (!out)
        throw Error(ErrorCode::IoError, "write failed for " + path);
}

double num(const json& j, const char* key) {
    if (!j.contains(key))
        throw Error(ErrorCode::ConfigInvalid, std::string("missing field ") + key);
    if (!j.at(key).is_number())
        throw Error(ErrorCode::ConfigInvalid, std::string("field ") + key + " must be a number");
    return j.at(key).get<double>();
}

double num_or(const json& j, const char* key, double fallback) {
    return j.contains(key) ? num(j, key) : fallback;
}

std::vector<double> num_list(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_array())
        throw Error(ErrorCode::ConfigInvalid, std::string("field ") + key + " must be a list of numbers");
    std::vector<double> out;
    for (const auto& v : j.at(key)) {
        if (!v.is_number())
            throw Error(ErrorCode::ConfigInvalid, std::string("field ") + key + " must be a list of numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

} // namespace

ScenarioConfig parse_config_text(const std::string& text, const std::string& source) {
    if (text.find_first_not_of(" \t\r\n") == std::string::npos)
        throw Error(ErrorCode::IoError, "empty config " + source);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ConfigInvalid, source + ": " + e.what());
    }
    if (!j.is_object())
        throw Error(ErrorCode::ConfigInvalid, source + ": top level must be an object");

    ScenarioConfig cfg;
    const std::string topo = j.value("topology", std::string("two_agent"));
    if (topo == "two_agent")
        cfg.topology = Topology::TwoAgent;
    else if (topo == "multi_agent")
        cfg.topology = Topology::MultiAgent;
    else
        throw Error(ErrorCode::ConfigInvalid, "field topology: unknown value " + topo);

    cfg.c = num(j, "c");
    cfg.d = num(j, "d");
    cfg.mu = num(j, "mu");
    if (!(cfg.c > 0.0))
        throw Error(ErrorCode::ConfigInvalid, "field c must be > 0");
    if (cfg.c > cfg.d)
        throw Error(ErrorCode::ConfigInvalid, "c ≤ d violated");
    if (!(cfg.mu > 0.0))
        throw Error(ErrorCode::ConfigInvalid, "field mu must be > 0");

    if (cfg.topology == Topology::TwoAgent) {
        cfg.a_i = num(j, "a_i");
        cfg.a_k = num(j, "a_k");
        cfg.tau_i0 = num_or(j, "tau_i0", 0.0);
        cfg.tau_k0 = num_or(j, "tau_k0", 0.0);
    } else {
        cfg.a_R = num(j, "a_R");
        cfg.tau_R0 = num_or(j, "tau_R0", 0.0);
        cfg.a = num_list(j, "a");
        if (cfg.a.empty())
            throw Error(ErrorCode::ConfigInvalid, "field a must name at least one child");
        cfg.tau_S0 = j.contains("tau_S0") ? num_list(j, "tau_S0") : std::vector<double>(cfg.a.size(), 0.0);
        if (cfg.tau_S0.size() != cfg.a.size())
            throw Error(ErrorCode::ConfigInvalid, "field tau_S0 must match the length of a");
    }

    if (j.contains("horizon")) {
        const json& h = j.at("horizon");
        cfg.horizon.t_max = num_or(h, "t_max", cfg.horizon.t_max);
        if (h.contains("j_max"))
            cfg.horizon.j_max = static_cast<std::int64_t>(num(h, "j_max"));
        if (!(cfg.horizon.t_max > 0.0))
            throw Error(ErrorCode::ConfigInvalid, "field horizon.t_max must be > 0");
        if (cfg.horizon.j_max <= 0)
            throw Error(ErrorCode::ConfigInvalid, "field horizon.j_max must be > 0");
    }
    cfg.flow_substeps = static_cast<int>(num_or(j, "flow_substeps", 0));
    if (cfg.flow_substeps < 0)
        throw Error(ErrorCode::ConfigInvalid, "field flow_substeps must be >= 0");
    cfg.seed = static_cast<std::uint64_t>(num_or(j, "seed", 0));

    if (j.contains("noise")) {
        const json& n = j.at("noise");
        if (n.contains("delay_jitter")) {
            const auto dj = num_list(n, "delay_jitter");
            if (dj.size() != 2 || !(dj[0] <= cfg.d && cfg.d <= dj[1]))
                throw Error(ErrorCode::ConfigInvalid, "field noise.delay_jitter must be [d1, d2] with d1 ≤ d ≤ d2");
            if (!(dj[0] >= cfg.c))
                throw Error(ErrorCode::ConfigInvalid, "field noise.delay_jitter: c ≤ d1 violated");
            cfg.noise.delay_jitter = DelayJitter{dj[0], dj[1]};
        }
        if (n.contains("rate_noise")) {
            const json& r = n.at("rate_noise");
            RateNoise rn{num(r, "std"), num(r, "bound")};
            if (!(rn.bound > 0.0))
                throw Error(ErrorCode::ConfigInvalid, "field noise.rate_noise.bound must be > 0");
            if (!(rn.std >= 0.0))
                throw Error(ErrorCode::ConfigInvalid, "field noise.rate_noise.std must be >= 0");
            cfg.noise.rate_noise = rn;
        }
    }
    if (j.contains("certificate"))
        cfg.certificate = j.at("certificate").get<std::string>();
    if (j.contains("outputs")) {
        const json& o = j.at("outputs");
        if (o.contains("trajectory"))
            cfg.trajectory_out = o.at("trajectory").get<std::string>();
        if (o.contains("plot_prefix"))
            cfg.plot_prefix = o.at("plot_prefix").get<std::string>();
    }
    return cfg;
}

ScenarioConfig parse_config(const std::string& path) {
    if (!std::filesystem::exists(path))
        throw Error(ErrorCode::IoError, "missing config " + path);
    return parse_config_text(slurp(path), path);
}

// ---------------------------------------------------------------- scenario

ScenarioResult run_scenario(const ScenarioConfig& cfg, const std::optional<Certificate>& cert) {
    ScenarioResult res;
    res.cert = cert;
    const Params params{cfg.c, cfg.d, cfg.mu};
    const RunOptions opts{cfg.flow_substeps};
    if (cfg.topology == Topology::TwoAgent) {
        const HybridState x0 = initial_state(cfg.tau_i0, cfg.tau_k0, cfg.a_i, cfg.a_k, cfg.c);
        res.traj = run(x0, params, cfg.horizon, cfg.noise, cfg.seed, opts);
        if (cert)
            annotate_lyapunov(res.traj, cert->P);
        res.report = verify_trajectory(res.traj, cert ? &*cert : nullptr);
    } else {
        res.multi = true;
        const MultiState x0 = initial_multi(cfg.tau_R0, cfg.a_R, cfg.tau_S0, cfg.a, cfg.c, cfg.d);
        res.mtraj = run_multi(x0, params, cfg.horizon, cfg.noise, cfg.seed, opts);
        if (cert)
            annotate_lyapunov(res.mtraj, cert->P);
        res.report = verify_multi(res.mtraj, cert ? &*cert : nullptr);
    }
    return res;
}

ScenarioResult run_scenario(const ScenarioConfig& cfg) {
    std::optional<Certificate> cert;
    if (cfg.certificate)
        cert = read_certificate(*cfg.certificate);
    return run_scenario(cfg, cert);
}

// ---------------------------------------------------------------- verification

std::vector<const CheckResult*> VerificationReport::checks() const {
    return {&eps_consistency, &m_membership, &v_flow, &v_jump, &bound, &terminal};
}

bool VerificationReport::ok() const {
    for (const CheckResult* c : checks())
        if (c->status == CheckStatus::Fail)
            return false;
    return true;
}

std::string VerificationReport::to_string() const {
    std::ostringstream os;
    for (const CheckResult* c : checks()) {
        const char* st = c->status == CheckStatus::Pass ? "PASS" : c->status == CheckStatus::Fail ? "FAIL" : "N/A ";
        os << st << "  " << c->name;
        if (c->status != CheckStatus::NotApplicable)
            os << "  worst=" << format_double(c->worst) << " limit=" << format_double(c->limit);
        if (!c->detail.empty())
            os << "  (" << c->detail << ")";
        os << "\n";
    }
    return os.str();
}

namespace {

void settle(CheckResult& r, double worst, double limit, std::string detail = {}) {
    r.worst = worst;
    r.limit = limit;
    r.status = worst <= limit ? CheckStatus::Pass : CheckStatus::Fail;
    r.detail = std::move(detail);
}

void not_applicable(CheckResult& r, std::string why) {
    r.status = CheckStatus::NotApplicable;
    r.detail = std::move(why);
}

bool same_param(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

void check_match(const Params& p, const Certificate& cert) {
    if (!same_param(p.c, cert.c) || !same_param(p.d, cert.d) ||
        (std::isfinite(p.mu) && !same_param(p.mu, cert.mu)))
        throw Error(ErrorCode::VerifyInputMismatch,
                    "trajectory (c, d, mu) = (" + format_double(p.c) + ", " + format_double(p.d) + ", " +
                        format_double(p.mu) + ") vs certificate (" + format_double(cert.c) + ", " +
                        format_double(cert.d) + ", " + format_double(cert.mu) + ")");
}

// Flow behaviour over segments of constant j; value(k) gives V at sample k.
template <class Samples, class ValueFn, class ModeFn>
void check_flows(CheckResult& r, const Samples& s, ValueFn value, ModeFn mode, double growth_rate) {
    double worst_const = 0.0;
    double worst_growth = 0.0;
    std::size_t k0 = 0;
    for (std::size_t k = 1; k < s.size(); ++k) {
        if (s[k].time.j != s[k0].time.j) {
            k0 = k;
            continue;
        }
        const double v0 = value(k0);
        const double v = value(k);
        if (mode(k0) == 1 || growth_rate == 0.0) {
            worst_const = std::max(worst_const, std::abs(v - v0));
        } else {
            const double cap = std::exp(growth_rate * (s[k].time.t - s[k0].time.t)) * v0;
            worst_growth = std::max(worst_growth, v - cap);
        }
    }
    settle(r, std::max(worst_const, worst_growth), kVFlowTol,
           "constant-segment drift " + format_double(worst_const) + ", growth excess " +
               format_double(worst_growth));
}

void check_terminal(CheckResult& r, double e0, double ef) {
    if (e0 > 0.0)
        settle(r, ef / e0, 1.0, "final |eps| / initial |eps|");
    else
        settle(r, ef, 0.0, "initial error is zero");
}

} // namespace

VerificationReport verify_trajectory(const Trajectory& traj, const Certificate* cert) {
    const Params& pr = traj.params;
    if (cert)
        check_match(pr, *cert);
    VerificationReport rep;
    const auto& s = traj.samples;
    if (s.empty()) {
        for (CheckResult* c : {&rep.eps_consistency, &rep.m_membership, &rep.v_flow, &rep.v_jump, &rep.bound,
                               &rep.terminal})
            not_applicable(*c, "empty trajectory");
        return rep;
    }

    double worst = 0.0;
    for (const Sample& x : s) {
        const HybridState& h = x.state;
        worst = std::max({worst, std::abs(h.eps.x1 - (h.tau_i - h.tau_k)), std::abs(h.eps.x2 - (h.a_i - h.a_k))});
    }
    settle(rep.eps_consistency, worst, kEpsTol);

    auto is_jump = [&](std::size_t k) { return k > 0 && s[k].time.j != s[k - 1].time.j; };
    auto is_correction = [&](std::size_t k) { return is_jump(k) && s[k - 1].state.p == 5; };

    if (!traj.has_buffers) {
        not_applicable(rep.m_membership, "timestamp buffers are not persisted");
    } else if (!traj.nominal) {
        not_applicable(rep.m_membership, "membership predicates assume nominal delays and rates");
    } else {
        std::size_t first = s.size();
        for (std::size_t k = 1; k < s.size(); ++k)
            if (is_correction(k)) {
                first = k;
                break;
            }
        if (first == s.size()) {
            not_applicable(rep.m_membership, "no correction event in trajectory");
        } else {
            double misses = 0;
            for (std::size_t k = first; k < s.size(); ++k)
                if (!memory_class(s[k].state, pr.c, pr.d))
                    misses += 1;
            settle(rep.m_membership, misses, 0.0, "samples outside M");
        }
    }

    if (!cert) {
        not_applicable(rep.v_flow, "no certificate");
        not_applicable(rep.v_jump, "no certificate");
        not_applicable(rep.bound, "no certificate");
    } else {
        std::vector<double> V(s.size());
        for (std::size_t k = 0; k < s.size(); ++k)
            V[k] = lyapunov_value(s[k].state.eps, s[k].state.tau, s[k].state.p, s[k].state.q, cert->P, pr.c, pr.d);
        check_flows(rep.v_flow, s, [&](std::size_t k) { return V[k]; }, [&](std::size_t k) { return s[k].state.q; },
                    cert->gamma / cert->alpha2);

        if (!traj.nominal) {
            not_applicable(rep.v_jump, "decrement is stated for nominal solutions");
        } else {
            double worst_g6 = -std::numeric_limits<double>::infinity();
            double worst_other = 0.0;
            for (std::size_t k = 1; k < s.size(); ++k) {
                if (!is_jump(k))
                    continue;
                const double dv = V[k] - V[k - 1];
                if (is_correction(k)) {
                    const double e = norm(s[k - 1].state.eps);
                    worst_g6 = std::max(worst_g6, dv + cert->sigma * e * e);
                } else {
                    worst_other = std::max(worst_other, std::abs(dv));
                }
            }
            if (!std::isfinite(worst_g6)) {
                not_applicable(rep.v_jump, "no correction event in trajectory");
            } else {
                settle(rep.v_jump, worst_g6, kVJumpSlack,
                       "dV + sigma|eps|^2 at corrections; drift at other jumps " + format_double(worst_other));
                if (worst_other > kVFlowTol)
                    rep.v_jump.status = CheckStatus::Fail;
            }
        }

        if (!traj.nominal) {
            not_applicable(rep.bound, "envelope is stated for nominal solutions");
        } else if (!cert->contraction_ok) {
            not_applicable(rep.bound, "certificate does not meet the contraction condition");
        } else {
            const double e0 = norm(s.front().state.eps);
            double ratio = 0.0;
            for (const Sample& x : s) {
                const double e = norm(x.state.eps);
                const double b = theoretical_bound(x.time.j, e0, *cert);
                ratio = std::max(ratio, b > 0.0 ? e / b : (e > 0.0 ? std::numeric_limits<double>::infinity() : 0.0));
            }
            settle(rep.bound, ratio, 1.0, "max |eps| / envelope");
        }
    }

    check_terminal(rep.terminal, norm(s.front().state.eps), norm(s.back().state.eps));
    return rep;
}

VerificationReport verify_multi(const MultiTrajectory& traj, const Certificate* cert) {
    const Params& pr = traj.params;
    if (cert)
        check_match(pr, *cert);
    VerificationReport rep;
    const auto& s = traj.samples;
    not_applicable(rep.bound, "no envelope is stated for the round-robin network");
    if (s.empty()) {
        for (CheckResult* c : {&rep.eps_consistency, &rep.m_membership, &rep.v_flow, &rep.v_jump, &rep.terminal})
            not_applicable(*c, "empty trajectory");
        return rep;
    }

    double worst = 0.0;
    for (const MultiSample& x : s) {
        const MultiState& m = x.state;
        for (int i = 0; i < m.n(); ++i) {
            worst = std::max(worst, std::abs(m.eps[i].x1 - (m.tau_R - m.tau_S[i])));
            if (traj.has_buffers)
                worst = std::max(worst, std::abs(m.eps[i].x2 - (m.a_R - m.a[i])));
        }
    }
    settle(rep.eps_consistency, worst, kEpsTol, traj.has_buffers ? "" : "rates not persisted; offsets only");

    auto is_jump = [&](std::size_t k) { return k > 0 && s[k].time.j != s[k - 1].time.j; };
    auto is_correction = [&](std::size_t k) { return is_jump(k) && s[k - 1].state.p == 5; };

    if (!traj.has_buffers) {
        not_applicable(rep.m_membership, "timestamp buffers are not persisted");
    } else if (!traj.nominal) {
        not_applicable(rep.m_membership, "membership predicates assume nominal delays and rates");
    } else {
        std::size_t first = s.size();
        for (std::size_t k = 1; k < s.size(); ++k)
            if (is_correction(k)) {
                first = k;
                break;
            }
        if (first == s.size()) {
            not_applicable(rep.m_membership, "no correction event in trajectory");
        } else {
            double misses = 0;
            for (std::size_t k = first; k < s.size(); ++k) {
                const MultiState& m = s[k].state;
                HybridState h;
                h.tau_i = m.tau_R;
                h.tau_k = m.tau_S[m.active - 1];
                h.a_i = m.a_R;
                h.a_k = m.a[m.active - 1];
                h.tau = m.tau;
                h.mem_i = m.mem_R;
                h.mem_k = m.mem_S;
                h.p = m.p;
                h.q = m.q;
                if (!memory_class(h, pr.c, pr.d))
                    misses += 1;
            }
            settle(rep.m_membership, misses, 0.0, "samples outside M for the active pair");
        }
    }

    if (!cert) {
        not_applicable(rep.v_flow, "no certificate");
        not_applicable(rep.v_jump, "no certificate");
    } else {
        const std::size_t n = static_cast<std::size_t>(s.front().state.n());
        std::vector<std::vector<double>> blocks(s.size(), std::vector<double>(n));
        std::vector<double> V(s.size(), 0.0);
        for (std::size_t k = 0; k < s.size(); ++k)
            for (std::size_t i = 0; i < n; ++i) {
                blocks[k][i] = multi_block_value(s[k].state.eps[i], s[k].state.tau_cycle[i], cert->P);
                V[k] += blocks[k][i];
            }
        check_flows(rep.v_flow, s, [&](std::size_t k) { return V[k]; }, [](std::size_t) { return 1; }, 0.0);

        if (!traj.nominal) {
            not_applicable(rep.v_jump, "decrement is stated for nominal solutions");
        } else {
            double worst_g6 = -std::numeric_limits<double>::infinity();
            double worst_other = 0.0;
            for (std::size_t k = 1; k < s.size(); ++k) {
                if (!is_jump(k))
                    continue;
                if (is_correction(k)) {
                    const std::size_t i = static_cast<std::size_t>(s[k - 1].state.active - 1);
                    const double e = norm(s[k - 1].state.eps[i]);
                    worst_g6 = std::max(worst_g6, blocks[k][i] - blocks[k - 1][i] + cert->sigma * e * e);
                } else {
                    worst_other = std::max(worst_other, std::abs(V[k] - V[k - 1]));
                }
            }
            if (!std::isfinite(worst_g6)) {
                not_applicable(rep.v_jump, "no correction event in trajectory");
            } else {
                settle(rep.v_jump, worst_g6, kVJumpSlack,
                       "active block dV + sigma|eps_i|^2 at corrections; drift at other jumps " +
                           format_double(worst_other));
                if (worst_other > kVFlowTol)
                    rep.v_jump.status = CheckStatus::Fail;
            }
        }
    }

    auto total = [](const MultiState& m) {
        double acc = 0.0;
        for (const Vector2& e : m.eps)
            acc += dot(e, e);
        return std::sqrt(acc);
    };
    check_terminal(rep.terminal, total(s.front().state), total(s.back().state));
    return rep;
}

// ---------------------------------------------------------------- CSV

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

const char* kTwoHeader = "t,j,p,q,tau,tau_i,tau_k,a_i,a_k,eps_tau,eps_a,V";

std::string multi_header(int n) {
    std::string h = "t,j,p,q,active,tau,tau_R";
    for (int i = 1; i <= n; ++i)
        h += ",tau_S_" + std::to_string(i);
    for (int i = 1; i <= n; ++i)
        h += ",eps_tau_" + std::to_string(i) + ",eps_a_" + std::to_string(i);
    return h + ",V";
}

void put(std::string& out, double v) {
    out += ',';
    out += format_double(v);
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = line.find(',', start);
        out.push_back(line.substr(start, pos - start));
        if (pos == std::string_view::npos)
            return out;
        start = pos + 1;
    }
}

double to_double(std::string_view f, const std::string& path) {
    double v = 0.0;
    const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
    if (res.ec != std::errc() || res.ptr != f.data() + f.size())
        throw Error(ErrorCode::IoError, path + ": bad number '" + std::string(f) + "'");
    return v;
}

std::int64_t to_int(std::string_view f, const std::string& path) {
    std::int64_t v = 0;
    const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
    if (res.ec != std::errc() || res.ptr != f.data() + f.size())
        throw Error(ErrorCode::IoError, path + ": bad integer '" + std::string(f) + "'");
    return v;
}

std::vector<std::string> read_lines(const std::string& path) {
    std::istringstream in(slurp(path));
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (!line.empty())
            lines.push_back(line);
    }
    if (lines.empty())
        throw Error(ErrorCode::IoError, "empty trajectory file " + path);
    return lines;
}

std::string meta_path(const std::string& path) { return path + ".meta.json"; }

void write_meta(const std::string& path, const Params& p, bool nominal, int children) {
    nlohmann::ordered_json j;
    j["c"] = p.c;
    j["d"] = p.d;
    j["mu"] = p.mu;
    j["nominal"] = nominal;
    j["children"] = children;
    spit(meta_path(path), j.dump(2) + "\n");
}

// Reads the sidecar if present; otherwise c and d are recovered from installed timer values.
template <class Samples>
void load_meta(const std::string& path, Params& p, bool& nominal, const Samples& s) {
    if (std::filesystem::exists(meta_path(path))) {
        try {
            const json j = json::parse(slurp(meta_path(path)));
            p = {j.at("c").get<double>(), j.at("d").get<double>(), j.at("mu").get<double>()};
            nominal = j.value("nominal", true);
            return;
        } catch (const json::exception& e) {
            throw Error(ErrorCode::IoError, meta_path(path) + ": " + e.what());
        }
    }
    p = {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN(),
         std::numeric_limits<double>::quiet_NaN()};
    nominal = true;
    for (std::size_t k = 1; k < s.size(); ++k) {
        if (s[k].time.j == s[k - 1].time.j)
            continue;
        if (s[k].state.q == 0 && std::isnan(p.c))
            p.c = s[k].state.tau;
        if (s[k].state.q == 1 && std::isnan(p.d))
            p.d = s[k].state.tau;
    }
}

} // namespace

std::string trajectory_csv(const Trajectory& traj) {
    std::string out = kTwoHeader;
    out += '\n';
    for (const Sample& s : traj.samples) {
        const HybridState& x = s.state;
        out += format_double(s.time.t);
        out += ',' + std::to_string(s.time.j) + ',' + std::to_string(x.p) + ',' + std::to_string(x.q);
        for (double v : {x.tau, x.tau_i, x.tau_k, x.a_i, x.a_k, x.eps.x1, x.eps.x2, s.V})
            put(out, v);
        out += '\n';
    }
    return out;
}

std::string trajectory_csv(const MultiTrajectory& traj) {
    const int n = traj.samples.empty() ? 0 : traj.samples.front().state.n();
    std::string out = multi_header(n);
    out += '\n';
    for (const MultiSample& s : traj.samples) {
        const MultiState& x = s.state;
        out += format_double(s.time.t);
        out += ',' + std::to_string(s.time.j) + ',' + std::to_string(x.p) + ',' + std::to_string(x.q) + ',' +
               std::to_string(x.active);
        put(out, x.tau);
        put(out, x.tau_R);
        for (double v : x.tau_S)
            put(out, v);
        for (const Vector2& e : x.eps) {
            put(out, e.x1);
            put(out, e.x2);
        }
        put(out, s.V);
        out += '\n';
    }
    return out;
}

void write_trajectory(const Trajectory& traj, const std::string& path) {
    spit(path, trajectory_csv(traj));
    write_meta(path, traj.params, traj.nominal, 1);
}

void write_trajectory(const MultiTrajectory& traj, const std::string& path) {
    spit(path, trajectory_csv(traj));
    const int n = traj.samples.empty() ? 0 : traj.samples.front().state.n();
    write_meta(path, traj.params, traj.nominal, n);
}

bool is_multi_csv(const std::string& path) {
    const auto lines = read_lines(path);
    return lines.front().rfind("t,j,p,q,active,", 0) == 0;
}

Trajectory read_trajectory(const std::string& path) {
    const auto lines = read_lines(path);
    if (lines.front() != kTwoHeader)
        throw Error(ErrorCode::IoError, path + ": unexpected header");
    Trajectory traj;
    traj.has_buffers = false;
    for (std::size_t k = 1; k < lines.size(); ++k) {
        const auto f = split(lines[k]);
        if (f.size() != 12)
            throw Error(ErrorCode::IoError, path + ": row " + std::to_string(k) + " has " + std::to_string(f.size()) + " fields");
        Sample s;
        s.time = {to_double(f[0], path), to_int(f[1], path)};
        HybridState& x = s.state;
        x.p = static_cast<int>(to_int(f[2], path));
        x.q = static_cast<int>(to_int(f[3], path));
        x.tau = to_double(f[4], path);
        x.tau_i = to_double(f[5], path);
        x.tau_k = to_double(f[6], path);
        x.a_i = to_double(f[7], path);
        x.a_k = to_double(f[8], path);
        x.eps = {to_double(f[9], path), to_double(f[10], path)};
        s.V = to_double(f[11], path);
        traj.samples.push_back(s);
    }
    load_meta(path, traj.params, traj.nominal, traj.samples);
    return traj;
}

double nominal_time_to_correction(int p, double tau, double c, double d) {
    double rest = tau;
    for (int k = p + 1; k <= 5; ++k)
        rest += k % 2 == 1 ? d : c;
    return rest;
}

MultiTrajectory read_multi_trajectory(const std::string& path) {
    const auto lines = read_lines(path);
    const auto head = split(lines.front());
    if (head.size() < 10 || (head.size() - 8) % 3 != 0)
        throw Error(ErrorCode::IoError, path + ": unexpected header");
    const int n = static_cast<int>((head.size() - 8) / 3);
    if (lines.front() != multi_header(n))
        throw Error(ErrorCode::IoError, path + ": unexpected header");
    MultiTrajectory traj;
    traj.has_buffers = false;
    for (std::size_t k = 1; k < lines.size(); ++k) {
        const auto f = split(lines[k]);
        if (f.size() != head.size())
            throw Error(ErrorCode::IoError, path + ": row " + std::to_string(k) + " has " + std::to_string(f.size()) + " fields");
        MultiSample s;
        s.time = {to_double(f[0], path), to_int(f[1], path)};
        MultiState& x = s.state;
        x.p = static_cast<int>(to_int(f[2], path));
        x.q = static_cast<int>(to_int(f[3], path));
        x.active = static_cast<int>(to_int(f[4], path));
        x.tau = to_double(f[5], path);
        x.tau_R = to_double(f[6], path);
        x.a_R = std::numeric_limits<double>::quiet_NaN();
        for (int i = 0; i < n; ++i) {
            x.tau_S.push_back(to_double(f[7 + i], path));
            x.a.push_back(std::numeric_limits<double>::quiet_NaN());
        }
        for (int i = 0; i < n; ++i)
            x.eps.push_back({to_double(f[7 + n + 2 * i], path), to_double(f[8 + n + 2 * i], path)});
        s.V = to_double(f[7 + 3 * n], path);
        traj.samples.push_back(s);
    }
    load_meta(path, traj.params, traj.nominal, traj.samples);
    // Cycle timers are not persisted; nominally they equal the time left to the next correction.
    for (MultiSample& s : traj.samples) {
        const double left = nominal_time_to_correction(s.state.p, s.state.tau, traj.params.c, traj.params.d);
        s.state.tau_cycle.assign(static_cast<std::size_t>(n), left);
    }
    return traj;
}

// ---------------------------------------------------------------- plot data

void emit_plot_data(const Trajectory& traj, const std::string& prefix) {
    std::string err = "t,abs_eps_tau,abs_eps_a\n";
    std::string lyap = "t,j,V\n";
    for (const Sample& s : traj.samples) {
        err += format_double(s.time.t) + ',' + format_double(std::abs(s.state.eps.x1)) + ',' +
               format_double(std::abs(s.state.eps.x2)) + '\n';
        lyap += format_double(s.time.t) + ',' + std::to_string(s.time.j) + ',' + format_double(s.V) + '\n';
    }
    spit(prefix + "_errors.csv", err);
    spit(prefix + "_lyapunov.csv", lyap);
}

void emit_plot_data(const MultiTrajectory& traj, const std::string& prefix) {
    const int n = traj.samples.empty() ? 0 : traj.samples.front().state.n();
    std::string err = "t";
    for (int i = 1; i <= n; ++i)
        err += ",abs_eps_tau_" + std::to_string(i) + ",abs_eps_a_" + std::to_string(i);
    err += '\n';
    std::string lyap = "t,j,V\n";
    for (const MultiSample& s : traj.samples) {
        err += format_double(s.time.t);
        for (const Vector2& e : s.state.eps)
            err += ',' + format_double(std::abs(e.x1)) + ',' + format_double(std::abs(e.x2));
        err += '\n';
        lyap += format_double(s.time.t) + ',' + std::to_string(s.time.j) + ',' + format_double(s.V) + '\n';
    }
    spit(prefix + "_errors.csv", err);
    spit(prefix + "_lyapunov.csv", lyap);
}

} // namespace clocksync
