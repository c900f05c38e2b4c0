#include "cqw/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "cqw/errors.hpp"

namespace cqw {

std::string format_number(double v) {
    if (!std::isfinite(v)) return "null";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

JsonValue& JsonValue::set(std::string key, JsonValue v) {
    auto* obj = std::get_if<Object>(&value_);
    if (!obj) throw ConfigError("JsonValue::set on a non-object");
    obj->emplace_back(std::move(key), std::move(v));
    return *this;
}

JsonValue& JsonValue::push(JsonValue v) {
    auto* arr = std::get_if<Array>(&value_);
    if (!arr) throw ConfigError("JsonValue::push on a non-array");
    arr->push_back(std::move(v));
    return *this;
}

namespace {

void write_string(std::string& out, const std::string& s) {
    out += '"';
    for (unsigned char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (c < 0x20) {
                    char esc[8];
                    std::snprintf(esc, sizeof esc, "\\u%04x", c);
                    out += esc;
                } else {
                    out += static_cast<char>(c);
                }
        }
    }
    out += '"';
}

// indent < 0 selects the compact layout.
void newline(std::string& out, int indent) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent) * 2, ' ');
}

}  // namespace

void JsonValue::write(std::string& out, int indent) const {
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::nullptr_t>) {
                out += "null";
            } else if constexpr (std::is_same_v<T, bool>) {
                out += v ? "true" : "false";
            } else if constexpr (std::is_same_v<T, std::int64_t>) {
                out += std::to_string(v);
            } else if constexpr (std::is_same_v<T, double>) {
                out += format_number(v);
            } else if constexpr (std::is_same_v<T, std::string>) {
                write_string(out, v);
            } else if constexpr (std::is_same_v<T, Array>) {
                if (v.empty()) {
                    out += "[]";
                    return;
                }
                out += '[';
                for (std::size_t i = 0; i < v.size(); ++i) {
                    if (i) out += ',';
                    newline(out, indent < 0 ? indent : indent + 1);
                    v[i].write(out, indent < 0 ? indent : indent + 1);
                }
                newline(out, indent);
                out += ']';
            } else {
                if (v.empty()) {
                    out += "{}";
                    return;
                }
                out += '{';
                for (std::size_t i = 0; i < v.size(); ++i) {
                    if (i) out += ',';
                    newline(out, indent < 0 ? indent : indent + 1);
                    write_string(out, v[i].first);
                    out += indent < 0 ? ":" : ": ";
                    v[i].second.write(out, indent < 0 ? indent : indent + 1);
                }
                newline(out, indent);
                out += '}';
            }
        },
        value_);
}

std::string JsonValue::dump(bool pretty) const {
    std::string out;
    write(out, pretty ? 0 : -1);
    if (pretty) out += '\n';
    return out;
}

LevelRow level_row(const BoundState& state) {
    const auto grid = default_well_grid(state);
    const auto samples = sample_wavefunction(state, grid);
    std::vector<double> sq(samples.psi.size());
    for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = samples.psi[i] * samples.psi[i];
    return {state.index, state.energy, state.node_count(), std::abs(simpson(sq, grid.step) - 1.0)};
}

std::string levels_csv(const std::vector<BoundState>& states) {
    std::string out = "index,energy,node_count,norm_residual\n";
    for (const auto& s : states) {
        const auto row = level_row(s);
        out += std::to_string(row.index) + ',' + format_number(row.energy) + ',' +
               std::to_string(row.node_count) + ',' + format_number(row.norm_residual) + '\n';
    }
    return out;
}

namespace {

JsonValue params_json(const WellParams& p) {
    auto o = JsonValue::object();
    o.set("v1", p.v1).set("v2", p.v2).set("b", p.b).set("d", p.d).set("period", p.period);
    return o;
}

JsonValue level_json(const BoundState& s) {
    const auto row = level_row(s);
    auto o = JsonValue::object();
    o.set("index", row.index)
        .set("energy", row.energy)
        .set("node_count", row.node_count)
        .set("norm_residual", row.norm_residual);
    return o;
}

JsonValue counts_json(const PhotonCounts& c) {
    auto o = JsonValue::object();
    o.set("l", c.l).set("m", c.m).set("n", c.n);
    return o;
}

}  // namespace

JsonValue design_json(const AlignmentDesign& design) {
    const double shifted_ground = design.ground.energy - design.params.b;
    const double shifted_excited = design.excited.energy - design.params.b;
    auto levels = JsonValue::array();
    levels.push(level_json(design.ground)).push(level_json(design.excited));
    auto o = JsonValue::object();
    o.set("b_star", design.params.b)
        .set("residual", design.residual)
        .set("level_count", count_levels(design.params))
        .set("params", params_json(design.params))
        .set("levels", std::move(levels))
        .set("next_well_ground", shifted_ground)
        .set("next_well_excited", shifted_excited)
        // E'_1 of the next well sits on E_0 of this one
        .set("alignment_gap", shifted_excited - design.ground.energy);
    return o;
}

JsonValue branching_json(const BranchingModel& br) {
    auto o = JsonValue::object();
    o.set("p_hh", br.p_hh).set("p_hl", br.p_hl).set("p_lh", br.p_lh).set("p_ll", br.p_ll);
    if (br.frequencies) {
        const auto& f = *br.frequencies;
        o.set("omega_minus", f.omega_minus)
            .set("omega_zero", f.omega_zero)
            .set("omega_plus", f.omega_plus)
            .set("delta_e", f.omega_plus - f.omega_zero);
    } else {
        o.set("omega_minus", nullptr).set("omega_zero", nullptr).set("omega_plus", nullptr).set("delta_e", nullptr);
    }
    o.set("weighting", to_string(br.weighting));
    return o;
}

JsonValue coupled_json(const LevelsReport& r) {
    const auto& c = r.coupled;
    auto coupled = JsonValue::object();
    coupled.set("e_plus", c.e_plus)
        .set("e_minus", c.e_minus)
        .set("delta_e", c.delta_e)
        .set("a_plus", c.a_plus)
        .set("b_plus", c.b_plus)
        .set("a_minus", c.a_minus)
        .set("b_minus", c.b_minus)
        .set("overlap", c.overlap)
        .set("coupling", c.coupling)
        .set("basis_phase", c.basis_phase)
        .set("norm_residual_plus", c.norm_residual(true))
        .set("norm_residual_minus", c.norm_residual(false))
        .set("cross_overlap", c.cross_overlap());

    const auto& f = r.frequencies;
    auto freqs = JsonValue::object();
    freqs.set("omega_minus", f.omega_minus)
        .set("omega_zero", f.omega_zero)
        .set("omega_plus", f.omega_plus)
        .set("terminal_low", f.terminal_low)
        .set("terminal_high", f.terminal_high);

    const auto& d = r.dipoles;
    auto dip = JsonValue::object();
    dip.set("d_hh", d.d_hh)
        .set("d_hl", d.d_hl)
        .set("d_lh", d.d_lh)
        .set("d_ll", d.d_ll)
        .set("d_hg", d.d_hg)
        .set("d_lg", d.d_lg);

    auto o = JsonValue::object();
    o.set("params", params_json(r.design.params))
        .set("coupled", std::move(coupled))
        .set("frequencies", std::move(freqs))
        .set("dipoles", std::move(dip));
    return o;
}

JsonValue distribution_json(const JointDistribution& dist, const InitialExcitation& init,
                            const BranchingModel& branching) {
    auto table = JsonValue::array();
    for (const auto& [c, f] : dist.table) {
        auto row = counts_json(c);
        row.set("f", f).set("amp", std::sqrt(f));
        table.push(std::move(row));
    }
    auto in = JsonValue::object();
    in.set("ch", init.c_h).set("cl", init.c_l);
    auto o = JsonValue::object();
    o.set("n", dist.n_total)
        .set("init", std::move(in))
        .set("branching", branching_json(branching))
        .set("table", std::move(table));
    return o;
}

std::string distribution_csv(const JointDistribution& dist) {
    std::string out = "l,m,n,f,amp\n";
    for (const auto& [c, f] : dist.table) {
        out += std::to_string(c.l) + ',' + std::to_string(c.m) + ',' + std::to_string(c.n) + ',' +
               format_number(f) + ',' + format_number(std::sqrt(f)) + '\n';
    }
    return out;
}

JsonValue analysis_json(const JointDistribution& dist, const InitialExcitation& init) {
    auto conditional = JsonValue::array();
    for (int m = 0; m <= dist.n_total; ++m) {
        const auto cs = conditional_state(dist, m);
        auto row = JsonValue::object();
        row.set("m", cs.measured_m)
            .set("s", cs.s)
            .set("kind", to_string(cs.kind))
            .set("alpha", cs.alpha)
            .set("beta", cs.beta);
        if (cs.kind == ConditionalKind::empty)
            row.set("entropy", nullptr);
        else
            row.set("entropy", entanglement_entropy(cs));
        row.set("weight", cs.weight);
        conditional.push(std::move(row));
    }

    const auto parity = parity_xor(dist);
    std::int64_t violations = 0;
    for (const auto& r : parity.rows)
        if (!r.holds) ++violations;
    auto par = JsonValue::object();
    par.set("gate", to_string(parity.gate))
        .set("all_hold", parity.all_hold)
        .set("checked", static_cast<std::int64_t>(parity.rows.size()))
        .set("violations", violations);
    auto logical = JsonValue::array();
    for (int mp = 0; mp <= 1; ++mp) {
        const auto proj = logical_qubit_projection(dist, mp);
        auto weights = JsonValue::array();
        for (const auto& [q, w] : proj.weights) {
            auto e = JsonValue::object();
            e.set("q_l", q.first).set("q_n", q.second).set("weight", w);
            weights.push(std::move(e));
        }
        auto e = JsonValue::object();
        e.set("m_parity", mp).set("weights", std::move(weights));
        logical.push(std::move(e));
    }
    par.set("logical", std::move(logical));

    const auto pur = purity_check(dist);
    auto purity = JsonValue::object();
    purity.set("trace", pur.trace)
        .set("trace_deviation", pur.trace_deviation)
        .set("idempotency_residual", pur.idempotency_residual)
        .set("rank_one_residual", pur.rank_one_residual)
        .set("pure", pur.pure);

    const auto marg = marginals(dist);
    auto to_array = [](const std::vector<double>& v) {
        auto a = JsonValue::array();
        for (double x : v) a.push(x);
        return a;
    };
    auto mg = JsonValue::object();
    mg.set("l", to_array(marg.l)).set("m", to_array(marg.m)).set("n", to_array(marg.n));

    auto in = JsonValue::object();
    in.set("ch", init.c_h).set("cl", init.c_l);

    auto o = JsonValue::object();
    o.set("n", dist.n_total)
        .set("init", std::move(in))
        .set("total", dist.total())
        .set("marginals", std::move(mg))
        .set("conditional", std::move(conditional))
        .set("parity", std::move(par))
        .set("purity", std::move(purity));
    return o;
}

std::string heatmap_csv(const JointDistribution& dist) {
    const auto pm = joint_pm(dist);
    std::string out = "l,n,p\n";
    for (int l = 0; l <= dist.n_total; ++l) {
        for (int n = 0; n <= dist.n_total; ++n) {
            const auto it = pm.find({l, n});
            const double p = it == pm.end() ? 0.0 : it->second;
            out += std::to_string(l) + ',' + std::to_string(n) + ',' + format_number(p) + '\n';
        }
    }
    return out;
}

namespace {

JsonValue collisions_json(const std::vector<PhotonCounts>& states) {
    auto a = JsonValue::array();
    for (const auto& c : states) a.push(counts_json(c));
    return a;
}

}  // namespace

JsonValue oracle_json(const OracleReport& report) {
    auto o = JsonValue::object();
    o.set("max_abs_diff", report.max_abs_diff).set("tv_distance", report.tv_distance);
    if (report.coherence) {
        o.set("final_norm", report.coherence->final_norm)
            .set("colliding_states", collisions_json(report.coherence->colliding_states));
    } else {
        o.set("final_norm", nullptr).set("colliding_states", nullptr);
    }
    return o;
}

JsonValue audit_json(int n_total, SignMode mode, const CoherenceReport& report) {
    auto o = JsonValue::object();
    o.set("n", n_total)
        .set("sign_mode", mode == SignMode::all_positive ? "all-positive" : "cmt-signs")
        .set("final_norm", report.final_norm)
        .set("colliding_states", collisions_json(report.colliding_states));
    return o;
}

}  // namespace cqw
