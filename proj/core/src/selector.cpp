#include "hsiband/selector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hsiband/csv.hpp"
#include "hsiband/error.hpp"
#include "hsiband/stats.hpp"

namespace hsiband {

void SelectionConfig::validate(int n_bands) const {
    if (n_select < 1 || n_select > k_candidates)
        throw ValidationError("selection config: need 1 <= n_select <= k_candidates");
    if (k_candidates > n_bands)
        throw ValidationError("selection config: k_candidates exceeds band count");
    if (corr_threshold <= 0.0 || corr_threshold > 1.0)
        throw ValidationError("selection config: corr_threshold must be in (0,1]");
    if (csnr_percentile <= 0.0 || csnr_percentile >= 100.0)
        throw ValidationError("selection config: csnr_percentile must be in (0,100)");
    if (adjacency_window < 1)
        throw ValidationError("selection config: adjacency_window must be >= 1");
    if (search_radius < 1)
        throw ValidationError("selection config: search_radius must be >= 1");
}

std::vector<Candidate> candidate_pool(const BandScoreTable& scores,
                                      const CorrelationMatrix& corr,
                                      const CsnrProfile& profile,
                                      const SelectionConfig& cfg) {
    const int n = static_cast<int>(scores.scores.size());
    if (n == 0) throw ValidationError("candidate_pool: empty score table");
    if (corr.n_bands() != n || static_cast<int>(profile.p_hi.size()) != n)
        throw ValidationError("candidate_pool: inputs disagree on channel count");
    cfg.validate(n);

    // (a) the JMIM-ranked channels; if the table carries no ranks, fall back
    // to the top k by marginal relevance.
    std::set<int> member;
    bool any_rank = false;
    for (const auto& s : scores.scores)
        if (s.jmim_rank) {
            member.insert(s.channel);
            any_rank = true;
        }
    if (!any_rank) {
        std::vector<int> order(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) order[static_cast<size_t>(i)] = i;
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            if (scores.scores[static_cast<size_t>(a)].relevance_mi !=
                scores.scores[static_cast<size_t>(b)].relevance_mi)
                return scores.scores[static_cast<size_t>(a)].relevance_mi >
                       scores.scores[static_cast<size_t>(b)].relevance_mi;
            return a < b;
        });
        for (int i = 0; i < cfg.k_candidates; ++i) member.insert(order[static_cast<size_t>(i)]);
    }
    std::set<int> from_jmim = member;

    // (b) reliably high CSNR.
    const double cut = cfg.csnr_percentile / 100.0;
    std::set<int> from_csnr;
    for (int ch = 0; ch < n; ++ch)
        if (profile.p_hi[static_cast<size_t>(ch)] >= cut) {
            member.insert(ch);
            from_csnr.insert(ch);
        }

    // (c) weakly coupled to everything pooled so far.
    std::set<int> from_lowcorr;
    const std::vector<int> base(member.begin(), member.end());
    for (int ch = 0; ch < n; ++ch) {
        double m = 0.0;
        for (int o : base)
            if (o != ch) m = std::max(m, std::abs(corr.values(ch, o)));
        if (m <= cfg.corr_threshold) from_lowcorr.insert(ch);
    }
    member.insert(from_lowcorr.begin(), from_lowcorr.end());

    std::vector<int> pool_channels(member.begin(), member.end());
    std::vector<Candidate> pool;
    pool.reserve(pool_channels.size());
    for (int ch : pool_channels) {
        Candidate c;
        c.channel = ch;
        c.relevance_mi = scores.scores[static_cast<size_t>(ch)].relevance_mi;
        c.jmim_rank = scores.scores[static_cast<size_t>(ch)].jmim_rank;
        c.p_hi = profile.p_hi[static_cast<size_t>(ch)];
        c.max_abs_corr = corr.max_abs_against(ch, pool_channels);
        c.from_jmim = from_jmim.count(ch) > 0;
        c.from_csnr = from_csnr.count(ch) > 0;
        c.from_lowcorr = from_lowcorr.count(ch) > 0;
        pool.push_back(c);
    }
    return pool;
}

ProvisionalSelection informed_select(const std::vector<Candidate>& pool,
                                     const CorrelationMatrix& corr,
                                     const SelectionConfig& cfg) {
    if (pool.empty()) throw ValidationError("informed_select: empty pool");

    std::vector<size_t> order(pool.size());
    for (size_t i = 0; i < pool.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (pool[a].relevance_mi != pool[b].relevance_mi)
            return pool[a].relevance_mi > pool[b].relevance_mi;
        return pool[a].channel < pool[b].channel;
    });

    std::vector<double> phis;
    phis.reserve(pool.size());
    for (const auto& c : pool) phis.push_back(c.p_hi);
    const double phi_median = percentile(phis, 50.0);

    ProvisionalSelection out;
    std::set<int> accepted;
    bool use_phi = true;
    double thr = cfg.corr_threshold;

    auto pass = [&]() {
        for (size_t oi : order) {
            if (static_cast<int>(out.channels.size()) >= cfg.n_select) return;
            const Candidate& c = pool[oi];
            if (accepted.count(c.channel)) continue;
            double worst = 0.0;
            int against = -1;
            for (int a : out.channels) {
                const double r = std::abs(corr.values(c.channel, a));
                if (r > worst) {
                    worst = r;
                    against = a;
                }
            }
            DecisionRecord rec;
            rec.channel = c.channel;
            rec.metrics = {{"relevance_mi", c.relevance_mi},
                           {"p_hi", c.p_hi},
                           {"max_corr_vs_accepted", worst}};
            if (worst > thr) {
                rec.action = "rejected";
                rec.reason = "correlation " + format_double(worst) + " with accepted channel " +
                             std::to_string(against) + " exceeds " + format_double(thr);
            } else if (use_phi && c.p_hi < phi_median) {
                rec.action = "rejected";
                rec.reason = "p_hi " + format_double(c.p_hi) + " below pool median " +
                             format_double(phi_median);
            } else {
                rec.action = "accepted";
                rec.reason = "passes correlation" + std::string(use_phi ? " and p_hi" : "") +
                             " criteria";
                out.channels.push_back(c.channel);
                accepted.insert(c.channel);
            }
            out.log.push_back(std::move(rec));
        }
    };

    pass();
    while (static_cast<int>(out.channels.size()) < cfg.n_select) {
        DecisionRecord relax;
        relax.action = "relaxed";
        if (use_phi) {
            use_phi = false;
            relax.reason = "dropped the p_hi clause (pool exhausted)";
        } else if (thr < 1.0) {
            thr = std::min(1.0, thr + 0.1);
            relax.reason = "raised correlation threshold to " + format_double(thr);
            relax.metrics = {{"corr_threshold", thr}};
        } else {
            relax.action = "warning";
            relax.reason = "pool exhausted with all criteria relaxed; selection short";
            out.log.push_back(std::move(relax));
            break;
        }
        ++out.relaxations;
        out.log.push_back(std::move(relax));
        pass();
    }
    out.effective_corr_threshold = thr;
    return out;
}

namespace {

const Candidate& pool_entry(const std::vector<Candidate>& pool, int channel) {
    for (const auto& c : pool)
        if (c.channel == channel) return c;
    throw ValidationError("diversity_refine: channel " + std::to_string(channel) +
                          " not in candidate pool");
}

}  // namespace

SelectionResult diversity_refine(const std::vector<int>& provisional,
                                 const CorrelationMatrix& corr,
                                 const std::vector<Candidate>& pool,
                                 const SelectionConfig& cfg) {
    if (static_cast<int>(provisional.size()) != cfg.n_select)
        throw ValidationError("diversity_refine: provisional size != n_select");
    for (int ch : provisional) pool_entry(pool, ch);  // membership check

    SelectionResult res;
    std::vector<int> current = provisional;

    // Each successful replacement strictly removes one conflicting pair and,
    // because a qualifying replacement is uncorrelated with every remaining
    // member, introduces none; the loop therefore terminates. The bound is a
    // backstop only.
    const int max_rounds = cfg.n_select * cfg.n_select + 4;
    bool ever_conflicted = false;
    for (int round = 0; round < max_rounds; ++round) {
        std::vector<int> sorted_cur = current;
        std::sort(sorted_cur.begin(), sorted_cur.end());
        int ca = -1, cb = -1;
        for (size_t i = 0; i < sorted_cur.size() && ca < 0; ++i)
            for (size_t j = i + 1; j < sorted_cur.size(); ++j) {
                const int a = sorted_cur[i], b = sorted_cur[j];
                if (std::abs(a - b) <= cfg.adjacency_window &&
                    std::abs(corr.values(a, b)) > cfg.corr_threshold) {
                    ca = a;
                    cb = b;
                    break;
                }
            }
        if (ca < 0) {
            if (!ever_conflicted)
                res.log.push_back({-1, "stable", "no adjacent correlated pairs", {}});
            break;
        }
        ever_conflicted = true;

        const Candidate& ea = pool_entry(pool, ca);
        const Candidate& eb = pool_entry(pool, cb);
        const bool keep_a =
            ea.relevance_mi != eb.relevance_mi ? ea.relevance_mi > eb.relevance_mi : ca < cb;
        const int keep = keep_a ? ca : cb;
        const int drop = keep_a ? cb : ca;

        std::vector<int> remaining;
        for (int ch : current)
            if (ch != drop) remaining.push_back(ch);

        const Candidate* best = nullptr;
        double best_worst = 0.0;
        for (const auto& c : pool) {
            if (std::abs(c.channel - keep) > cfg.search_radius) continue;
            if (std::find(current.begin(), current.end(), c.channel) != current.end()) continue;
            double worst = 0.0;
            for (int m : remaining) worst = std::max(worst, std::abs(corr.values(c.channel, m)));
            if (worst > cfg.corr_threshold) continue;
            const bool better =
                !best || worst < best_worst ||
                (worst == best_worst &&
                 (c.p_hi > best->p_hi || (c.p_hi == best->p_hi && c.channel < best->channel)));
            if (better) {
                best = &c;
                best_worst = worst;
            }
        }

        if (!best) {
            DecisionRecord warn;
            warn.channel = drop;
            warn.action = "warning";
            warn.reason = "channels " + std::to_string(ca) + " and " + std::to_string(cb) +
                          " are adjacent and correlated but no qualifying replacement exists "
                          "within radius " +
                          std::to_string(cfg.search_radius) + "; keeping provisional set";
            warn.metrics = {{"corr", std::abs(corr.values(ca, cb))}};
            res.log.push_back(std::move(warn));
            break;
        }

        DecisionRecord repl;
        repl.channel = drop;
        repl.action = "replaced";
        repl.reason = "adjacent to channel " + std::to_string(keep) + " (|dCh| <= " +
                      std::to_string(cfg.adjacency_window) + ") with correlation above " +
                      format_double(cfg.corr_threshold);
        repl.metrics = {{"corr", std::abs(corr.values(ca, cb))},
                        {"kept_channel", static_cast<double>(keep)}};
        res.log.push_back(std::move(repl));

        DecisionRecord acc;
        acc.channel = best->channel;
        acc.action = "accepted";
        acc.reason = "replacement for channel " + std::to_string(drop);
        acc.metrics = {{"max_corr_vs_set", best_worst},
                       {"p_hi", best->p_hi},
                       {"relevance_mi", best->relevance_mi}};
        res.log.push_back(std::move(acc));

        std::replace(current.begin(), current.end(), drop, best->channel);
    }

    std::sort(current.begin(), current.end());
    res.channels = current;
    return res;
}

SelectionOutcome select_bands(const SpectralCube& cube, const PatchSet& patches,
                              const SelectionConfig& cfg, const SelectOptions& opts) {
    cube.validate();
    patches.validate();
    cfg.validate(cube.bands());
    if (opts.bins < 2) throw ValidationError("select_bands: bins must be >= 2");
    if (opts.draws < 2) throw ValidationError("select_bands: draws must be >= 2");
    if (patches.n_classes() < 2)
        throw ValidationError("select_bands: need at least two patch classes");

    // Pool every labeled pixel (patch order, row-major within a patch).
    size_t n_pixels = 0;
    for (const auto& p : patches.patches) n_pixels += p.area();
    const int n_bands = cube.bands();
    Eigen::MatrixXd samples(static_cast<Eigen::Index>(n_pixels), n_bands);
    ClassVector classes;
    classes.n_classes = patches.n_classes();
    classes.labels.reserve(n_pixels);
    Eigen::Index row = 0;
    for (const auto& p : patches.patches) {
        Eigen::MatrixXd sub = extract_patch_samples(cube, p);
        samples.middleRows(row, sub.rows()) = sub;
        row += sub.rows();
        classes.labels.insert(classes.labels.end(), p.area(), p.class_id);
    }

    std::vector<DiscretizedBand> bands;
    bands.reserve(static_cast<size_t>(n_bands));
    std::vector<double> column(n_pixels);
    for (int b = 0; b < n_bands; ++b) {
        for (size_t i = 0; i < n_pixels; ++i)
            column[i] = samples(static_cast<Eigen::Index>(i), b);
        bands.push_back(quantize_band(column, opts.bins));
    }

    SelectionOutcome out;
    JmimResult jmim = jmim_rank(bands, classes, cfg.k_candidates);
    out.scores = std::move(jmim.table);
    out.corr = correlation_matrix(samples);
    out.csnr = csnr_table(cube, patches, opts.draws, opts.seed, opts.background_class);
    out.profile = csnr_high_probability(out.csnr, cfg.csnr_percentile);

    auto pool = candidate_pool(out.scores, out.corr, out.profile, cfg);
    auto prov = informed_select(pool, out.corr, cfg);
    SelectionResult refined = diversity_refine(prov.channels, out.corr, pool, cfg);

    SelectionResult& res = out.result;
    for (size_t i = 0; i < jmim.order.size(); ++i) {
        DecisionRecord rec;
        rec.channel = jmim.order[i];
        rec.action = "ranked";
        rec.reason = "joint-MI pick " + std::to_string(i);
        rec.metrics = {{"score", jmim.pick_scores[i]}};
        res.log.push_back(std::move(rec));
    }
    res.log.insert(res.log.end(), prov.log.begin(), prov.log.end());
    res.log.insert(res.log.end(), refined.log.begin(), refined.log.end());
    res.channels = refined.channels;
    res.wavelengths_nm.clear();
    for (int ch : res.channels)
        res.wavelengths_nm.push_back(cube.axis.wavelengths_nm[static_cast<size_t>(ch)]);
    return out;
}

void write_selection_json(const SelectionResult& result, const SelectionConfig& cfg,
                          const SelectOptions& opts, std::ostream& out) {
    nlohmann::ordered_json doc;
    doc["channels"] = result.channels;
    doc["wavelengths_nm"] = result.wavelengths_nm;
    doc["config"] = {{"k_candidates", cfg.k_candidates},
                     {"n_select", cfg.n_select},
                     {"corr_threshold", cfg.corr_threshold},
                     {"csnr_percentile", cfg.csnr_percentile},
                     {"adjacency_window", cfg.adjacency_window},
                     {"search_radius", cfg.search_radius},
                     {"bins", opts.bins},
                     {"draws", opts.draws},
                     {"seed", opts.seed},
                     {"background_class", opts.background_class}};
    doc["log"] = nlohmann::ordered_json::array();
    for (const auto& rec : result.log) {
        nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
        for (const auto& [k, v] : rec.metrics) metrics[k] = v;
        doc["log"].push_back({{"channel", rec.channel},
                              {"action", rec.action},
                              {"reason", rec.reason},
                              {"metrics", std::move(metrics)}});
    }
    out << doc.dump(2) << '\n';
}

SelectionResult read_selection_json(std::istream& in) {
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("selection document: ") + e.what());
    }
    if (!doc.contains("channels") || !doc["channels"].is_array())
        throw ValidationError("selection document: missing channels array");
    SelectionResult res;
    for (const auto& c : doc["channels"]) res.channels.push_back(c.get<int>());
    if (doc.contains("wavelengths_nm"))
        for (const auto& w : doc["wavelengths_nm"]) res.wavelengths_nm.push_back(w.get<double>());
    return res;
}

}  // namespace hsiband
