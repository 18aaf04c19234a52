#include "molcf/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "molcf/rng.hpp"
#include "molcf/smiles.hpp"

namespace molcf {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kVarianceFloor = 1e-12;   // for RLL on calibrated uncertainties

std::vector<std::string> split_list(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string item;
    while (std::getline(in, item, sep))
        if (!item.empty()) out.push_back(item);
    return out;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;
    int n = 0;
};

MeanStd mean_std(const std::vector<double>& xs) {
    MeanStd ms;
    ms.n = static_cast<int>(xs.size());
    if (xs.empty()) return ms;
    for (double x : xs) ms.mean += x;
    ms.mean /= xs.size();
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - ms.mean) * (x - ms.mean);
        ms.std = std::sqrt(ss / (xs.size() - 1));
    }
    return ms;
}

json agg_json(const std::vector<double>& xs) {
    MeanStd ms = mean_std(xs);
    return json{{"mean", ms.mean}, {"std", ms.std}, {"n", ms.n}};
}

// Left-continuous step function evaluation: value at the last breakpoint <= x.
double step_eval(const std::vector<double>& xs, const std::vector<double>& vs, double x) {
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    if (it == xs.begin()) return vs.front();
    return vs[static_cast<std::size_t>(it - xs.begin()) - 1];
}

}  // namespace

ExperimentConfig ExperimentConfig::from_config(const Config& cfg) {
    ExperimentConfig ec;
    ec.dataset_source = cfg.get_str("dataset.source", ec.dataset_source);
    ec.dataset_path = cfg.get_str("dataset.path", "");
    ec.dataset_n = cfg.get_int("dataset.n", ec.dataset_n);
    ec.dataset_max_steps = cfg.get_int("dataset.max_steps", ec.dataset_max_steps);
    std::string seeds = cfg.get_str("dataset.seeds", "");
    if (!seeds.empty()) ec.dataset_seeds = split_list(seeds, ';');

    ec.split_spec.kind = split_kind_from_string(cfg.get_str("split.kind", "iid"));
    ec.split_spec.train_frac = cfg.get_double("split.train", 0.8);
    ec.split_spec.cal_frac = cfg.get_double("split.calibration", 0.1);
    ec.split_spec.test_frac = cfg.get_double("split.test", 0.1);
    std::string tails = cfg.get_str("split.value_tails", "both");
    ec.split_spec.tails = tails == "upper"  ? ValueTails::upper
                          : tails == "lower" ? ValueTails::lower
                                             : ValueTails::both;

    ec.rc.architecture = architecture_from_string(cfg.get_str("model.arch", "gatv2lite"));
    ec.rc.layers = cfg.get_int("model.layers", 3);
    ec.rc.hidden_dim = cfg.get_int("model.hidden", 32);

    ec.tc.epochs = cfg.get_int("train.epochs", 150);
    ec.tc.learning_rate = cfg.get_double("train.learning_rate", 0.01);
    ec.tc.batch_size = cfg.get_int("train.batch_size", 32);
    ec.tc.grad_clip_norm = cfg.get_double("train.grad_clip_norm", 5.0);
    MveConfig mve;
    mve.beta = cfg.get_double("train.mve_beta", 0.5);
    mve.warmup_epochs = cfg.get_int("train.mve_warmup_epochs", ec.tc.epochs / 4);
    ec.tc.mve = mve;

    ec.estimator.method = uq_method_from_string(cfg.get_str("estimator.kind", "de_mve"));
    ec.estimator.ensemble_size = cfg.get_int("estimator.ensemble_size", 3);
    ec.estimator.swag_window = cfg.get_int("estimator.swag_window", 25);
    ec.estimator.swag_samples = cfg.get_int("estimator.swag_samples", 50);

    ec.cf.enabled = cfg.get_bool("counterfactual.enabled", true);
    ec.cf.n_originals = cfg.get_int("counterfactual.n_originals", 50);
    ec.cf.top_k = cfg.get_int("counterfactual.top_k", 10);
    ec.cf.retention = cfg.get_double("counterfactual.retention", 0.2);
    std::string mode = cfg.get_str("counterfactual.rank_mode", "absolute");
    ec.cf.rank_mode = mode == "higher"  ? RankMode::higher
                      : mode == "lower" ? RankMode::lower
                                        : RankMode::absolute;

    ec.repetitions = cfg.get_int("run.repetitions", 3);
    ec.master_seed = cfg.get_u64("run.master_seed", 7);
    ec.out_dir = cfg.get_str("run.out_dir", "out");
    ec.raw = cfg;
    return ec;
}

std::vector<LabeledSample> load_dataset(const ExperimentConfig& cfg) {
    if (cfg.dataset_source == "synthetic") {
        auto rng = make_rng(derive_seed(cfg.master_seed, {0xD5}));
        return generate_dataset(cfg.dataset_n, cfg.dataset_max_steps, rng, cfg.dataset_seeds);
    }
    std::ifstream in(cfg.dataset_path);
    if (!in) throw DatasetError("cannot open dataset file: " + cfg.dataset_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (cfg.dataset_source == "jsonl") return dataset_from_jsonl(buf.str());
    if (cfg.dataset_source == "smiles") {
        std::vector<LabeledSample> samples;
        std::istringstream lines(buf.str());
        std::string line;
        while (std::getline(lines, line)) {
            if (line.empty() || line[0] == '#') continue;
            MolecularGraph g = parse_smiles(line);
            double y = crippen_logp(g);
            samples.push_back({std::move(g), y, write_smiles(parse_smiles(line))});
        }
        if (samples.empty()) throw DatasetError("empty SMILES corpus: " + cfg.dataset_path);
        return samples;
    }
    throw DatasetError("unknown dataset source: " + cfg.dataset_source);
}

CfStageResult run_counterfactual_stage(const std::vector<const LabeledSample*>& originals,
                                       const Predictor& predictor,
                                       const ScalarFn& uncertainty_raw,
                                       const CalibrateFn& calibrate, const ScalarFn& oracle_fn,
                                       const std::vector<double>& test_sigma2_cal,
                                       const CfStageOptions& opts) {
    CfStageResult res;
    for (const LabeledSample* s : originals) {
        std::vector<MolecularGraph> candidates = enumerate_1_edit(s->graph);
        if (candidates.empty()) continue;
        auto ranked = rank_counterfactuals(predictor, s->graph, candidates, opts.top_k,
                                           opts.rank_mode);
        for (auto& r : ranked) {
            r.y = s->y;
            r.sigma2_prime_raw = uncertainty_raw(r.perturbed);
            r.sigma2_prime = calibrate(r.sigma2_prime_raw);
            r.y_prime = oracle_fn(r.perturbed);
            EvalRecord orig{s->y, r.y_hat, 0.0};
            EvalRecord cf{*r.y_prime, r.y_hat_prime, 0.0};
            r.truthful_bit = truthful(orig, cf);
            res.records.push_back(std::move(r));
        }
    }

    RetentionThreshold thr = retention_threshold(test_sigma2_cal, opts.retention);
    res.metrics.xi20 = thr.xi;
    res.metrics.n_records = static_cast<int>(res.records.size());

    std::vector<int> bits;
    std::vector<EvalRecord> cf_eval;
    std::vector<double> errors, sigmas;
    for (const auto& r : res.records) {
        bits.push_back(*r.truthful_bit);
        cf_eval.push_back({*r.y_prime, r.y_hat_prime, r.sigma2_prime_raw});
        errors.push_back(std::fabs(*r.y_prime - r.y_hat_prime));
        sigmas.push_back(r.sigma2_prime_raw);
    }
    TruthfulnessResult tr0 = relative_truthfulness(bits);
    res.metrics.tr_initial = tr0.value;
    res.metrics.tr_initial_defined = tr0.defined;

    auto filtered = filter_by_uncertainty(res.records, thr.xi);
    res.metrics.n_retained = static_cast<int>(filtered.size());
    std::vector<int> kept_bits;
    for (const auto& r : filtered) kept_bits.push_back(*r.truthful_bit);
    TruthfulnessResult tr1 = relative_truthfulness(kept_bits);
    res.metrics.tr_filtered = tr1.value;
    res.metrics.tr_filtered_defined = tr1.defined;
    res.metrics.tr_gain_defined = tr0.defined && tr1.defined;
    if (res.metrics.tr_gain_defined) res.metrics.tr_gain = tr1.value - tr0.value;

    if (cf_eval.size() >= 2) {
        try {
            res.metrics.rho = pearson_rho(errors, sigmas);
        } catch (const MetricError&) {
            res.metrics.rho_defined = false;
        }
        res.metrics.uer_auc_mean = uer_curve(cf_eval, Accumulator::mean).auc;
    } else {
        res.metrics.rho_defined = false;
    }
    return res;
}

namespace {

RepetitionResult run_repetition(const ExperimentConfig& cfg,
                                const std::vector<LabeledSample>& dataset, int rep) {
    RepetitionResult res;
    res.rep = rep;
    res.seed = derive_seed(cfg.master_seed, {0x0E, static_cast<std::uint64_t>(rep)});

    SplitSpec spec = cfg.split_spec;
    spec.seed = derive_seed(res.seed, {1});
    SplitResult parts = split(dataset, spec);

    std::vector<LabeledSample> train_set;
    for (int i : parts.train) train_set.push_back(dataset[i]);

    FittedEstimator est = fit(cfg.estimator, train_set, cfg.rc, cfg.tc,
                              derive_seed(res.seed, {2}));

    // calibration on the held-out calibration split
    std::vector<std::pair<double, double>> pairs;
    for (int i : parts.calibration) {
        UncertainPrediction p = predict(est, dataset[i].graph);
        pairs.emplace_back(p.sigma2_raw, std::fabs(p.y_hat - dataset[i].y));
    }
    IsotonicMap iso = fit_isotonic(pairs);

    // test evaluation
    std::vector<double> ys, yhats, errors, sig_cal, sig_raw;
    for (int i : parts.test) {
        UncertainPrediction p = predict(est, dataset[i].graph);
        double cal = apply(iso, p.sigma2_raw);
        res.eval_records.push_back({dataset[i].smiles, dataset[i].y, p.y_hat, p.sigma2_raw, cal});
        ys.push_back(dataset[i].y);
        yhats.push_back(p.y_hat);
        errors.push_back(std::fabs(p.y_hat - dataset[i].y));
        sig_cal.push_back(cal);
        sig_raw.push_back(p.sigma2_raw);
    }

    res.metrics.r2 = r_squared(ys, yhats);
    try {
        res.metrics.rho = pearson_rho(errors, sig_cal);
    } catch (const MetricError&) {
        try {
            res.metrics.rho = pearson_rho(errors, sig_raw);
            res.metrics.rho_on_raw = true;
        } catch (const MetricError&) {
            res.metrics.rho_defined = false;
        }
    }
    // UER curves integrate the raw uncertainties: calibration is monotone, so the
    // filtering order is the same, but a heavily pooled map would compress the
    // normalized thresholds toward 1 and inflate the empty-prefix area.
    std::vector<EvalRecord> eval;
    for (std::size_t k = 0; k < ys.size(); ++k) eval.push_back({ys[k], yhats[k], sig_raw[k]});
    res.metrics.uer_auc_mean = uer_curve(eval, Accumulator::mean).auc;
    res.metrics.uer_auc_max = uer_curve(eval, Accumulator::max).auc;
    // RLL is the scale-alignment metric and reads the calibrated values
    std::vector<EvalRecord> eval_cal;
    for (std::size_t k = 0; k < ys.size(); ++k)
        eval_cal.push_back({ys[k], yhats[k], std::max(sig_cal[k], kVarianceFloor)});
    RllResult rl = rll(eval_cal);
    res.metrics.rll = rl.value;
    res.metrics.rll_defined = rl.defined;

    if (cfg.cf.enabled) {
        std::vector<const LabeledSample*> originals;
        for (int k = 0; k < std::min<int>(cfg.cf.n_originals, static_cast<int>(parts.test.size()));
             ++k)
            originals.push_back(&dataset[parts.test[k]]);
        Predictor predictor = [&](const MolecularGraph& g) { return predict(est, g).y_hat; };
        ScalarFn uncertainty_raw = [&](const MolecularGraph& g) {
            return predict(est, g).sigma2_raw;
        };
        CalibrateFn calibrate = [&](double raw) { return apply(iso, raw); };
        ScalarFn oracle_fn = [](const MolecularGraph& g) { return crippen_logp(g); };
        CfStageResult cf = run_counterfactual_stage(originals, predictor, uncertainty_raw,
                                                    calibrate, oracle_fn, sig_cal, cfg.cf);
        res.cf = cf.metrics;
        res.cf_present = true;
        res.cf_records = std::move(cf.records);
    }
    res.ok = true;
    return res;
}

json rep_to_json(const RepetitionResult& r) {
    json j;
    j["rep"] = r.rep;
    j["seed"] = r.seed;
    j["ok"] = r.ok;
    if (!r.ok) {
        j["error"] = r.error;
        return j;
    }
    json m;
    m["r2"] = r.metrics.r2;
    if (r.metrics.rho_defined) m["rho"] = r.metrics.rho;
    m["rho_defined"] = r.metrics.rho_defined;
    m["rho_on_raw"] = r.metrics.rho_on_raw;
    m["uer_auc_mean"] = r.metrics.uer_auc_mean;
    m["uer_auc_max"] = r.metrics.uer_auc_max;
    if (r.metrics.rll_defined) m["rll"] = r.metrics.rll;
    m["rll_defined"] = r.metrics.rll_defined;
    j["metrics"] = m;
    if (r.cf_present) {
        json c;
        c["xi20"] = r.cf.xi20;
        c["n_records"] = r.cf.n_records;
        c["n_retained"] = r.cf.n_retained;
        if (r.cf.rho_defined) c["rho"] = r.cf.rho;
        c["rho_defined"] = r.cf.rho_defined;
        c["uer_auc_mean"] = r.cf.uer_auc_mean;
        if (r.cf.tr_initial_defined) c["tr_initial"] = r.cf.tr_initial;
        if (r.cf.tr_filtered_defined) c["tr_filtered"] = r.cf.tr_filtered;
        if (r.cf.tr_gain_defined) c["tr_gain"] = r.cf.tr_gain;
        j["counterfactual"] = c;
    }
    return j;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    std::vector<LabeledSample> dataset = load_dataset(cfg);

    ExperimentReport out;
    for (int rep = 0; rep < cfg.repetitions; ++rep) {
        RepetitionResult res;
        try {
            res = run_repetition(cfg, dataset, rep);
        } catch (const std::exception& e) {
            res.rep = rep;
            res.seed = derive_seed(cfg.master_seed, {0x0E, static_cast<std::uint64_t>(rep)});
            res.ok = false;
            res.error = e.what();
        }
        out.reps.push_back(std::move(res));
    }

    json j;
    j["schema"] = "molcf-report-v1";
    j["version"] = kVersion;
    j["config_hash"] = cfg.raw.hash();
    j["config"] = json::object();
    for (const auto& [k, v] : cfg.raw.values()) j["config"][k] = v;
    j["master_seed"] = cfg.master_seed;
    j["repetitions"] = json::array();
    for (const auto& r : out.reps) j["repetitions"].push_back(rep_to_json(r));

    auto collect = [&](auto getter, auto defined) {
        std::vector<double> xs;
        for (const auto& r : out.reps)
            if (r.ok && defined(r)) xs.push_back(getter(r));
        return xs;
    };
    json agg;
    agg["r2"] = agg_json(collect([](const auto& r) { return r.metrics.r2; },
                                 [](const auto&) { return true; }));
    agg["rho"] = agg_json(collect([](const auto& r) { return r.metrics.rho; },
                                  [](const auto& r) { return r.metrics.rho_defined; }));
    agg["uer_auc_mean"] = agg_json(collect([](const auto& r) { return r.metrics.uer_auc_mean; },
                                           [](const auto&) { return true; }));
    agg["uer_auc_max"] = agg_json(collect([](const auto& r) { return r.metrics.uer_auc_max; },
                                          [](const auto&) { return true; }));
    agg["rll"] = agg_json(collect([](const auto& r) { return r.metrics.rll; },
                                  [](const auto& r) { return r.metrics.rll_defined; }));
    agg["cf_uer_auc_mean"] =
        agg_json(collect([](const auto& r) { return r.cf.uer_auc_mean; },
                         [](const auto& r) { return r.cf_present; }));
    agg["cf_rho"] = agg_json(collect([](const auto& r) { return r.cf.rho; },
                                     [](const auto& r) { return r.cf_present && r.cf.rho_defined; }));
    agg["tr_initial"] =
        agg_json(collect([](const auto& r) { return r.cf.tr_initial; },
                         [](const auto& r) { return r.cf_present && r.cf.tr_initial_defined; }));
    agg["tr_gain"] =
        agg_json(collect([](const auto& r) { return r.cf.tr_gain; },
                         [](const auto& r) { return r.cf_present && r.cf.tr_gain_defined; }));
    j["aggregate"] = agg;
    out.report = j;

    // artifacts
    write_file(fs::path(cfg.out_dir) / "report.json", j.dump(2) + "\n");
    write_file(fs::path(cfg.out_dir) / "config_resolved.ini", cfg.raw.resolved_text());
    for (const auto& r : out.reps) {
        if (!r.ok) continue;
        write_file(fs::path(cfg.out_dir) / ("eval_records_rep" + std::to_string(r.rep) + ".jsonl"),
                   eval_records_to_jsonl(r.eval_records));
        if (r.cf_present)
            write_file(fs::path(cfg.out_dir) /
                           ("counterfactuals_rep" + std::to_string(r.rep) + ".jsonl"),
                       counterfactuals_to_jsonl(r.cf_records));
    }
    emit_curves(cfg, out.reps, cfg.out_dir);
    return out;
}

void emit_curves(const ExperimentConfig& cfg, const std::vector<RepetitionResult>& reps,
                 const std::string& out_dir) {
    fs::create_directories(out_dir);

    // test-set UER curves
    for (Accumulator g : {Accumulator::mean, Accumulator::max}) {
        const char* tag = g == Accumulator::mean ? "mean" : "max";
        std::vector<std::vector<double>> grids, deltas;
        for (const auto& r : reps) {
            if (!r.ok) continue;
            std::vector<EvalRecord> eval;
            for (const auto& e : r.eval_records) eval.push_back({e.y, e.y_hat, e.sigma2_raw});
            UerCurve c = uer_curve(eval, g);
            std::ostringstream csv;
            csv << "# schema: molcf-curve-v1\nxi,gamma,delta_rel\n";
            for (std::size_t k = 0; k < c.grid.size(); ++k)
                csv << fmt(c.grid[k]) << "," << fmt(c.gamma[k]) << "," << fmt(c.delta_rel[k])
                    << "\n";
            write_file(fs::path(out_dir) /
                           ("uer_" + std::string(tag) + "_rep" + std::to_string(r.rep) + ".csv"),
                       csv.str());
            grids.push_back(c.grid);
            deltas.push_back(c.delta_rel);
        }
        if (!grids.empty()) {
            std::ostringstream csv;
            csv << "# schema: molcf-curve-v1\nxi,delta_rel_mean\n";
            for (int s = 0; s <= 100; ++s) {
                double xi = s / 100.0;
                double sum = 0.0;
                for (std::size_t r = 0; r < grids.size(); ++r)
                    sum += step_eval(grids[r], deltas[r], xi);
                csv << fmt(xi) << "," << fmt(sum / grids.size()) << "\n";
            }
            write_file(fs::path(out_dir) / ("uer_" + std::string(tag) + "_avg.csv"), csv.str());
        }
    }

    // counterfactual sweep curves: error reduction, truthfulness, retained fraction
    struct CfCurve {
        std::vector<double> xi_norm, delta, tr, frac;
        std::vector<char> tr_def;
    };
    std::vector<CfCurve> curves;
    for (const auto& r : reps) {
        if (!r.ok || !r.cf_present || r.cf_records.empty()) continue;
        double smax = 0.0;
        for (const auto& c : r.cf_records) smax = std::max(smax, c.sigma2_prime);
        std::vector<double> thresholds{0.0, r.cf.xi20};
        for (const auto& c : r.cf_records) thresholds.push_back(c.sigma2_prime);
        if (smax > 0) thresholds.push_back(smax);
        std::sort(thresholds.begin(), thresholds.end());
        thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

        double full_mean = 0.0;
        double max_mean = 0.0;
        CfCurve cur;
        std::ostringstream csv;
        csv << "# schema: molcf-cf-curve-v1\nxi_norm,xi_abs,delta_rel_mean,truthfulness,"
               "retained_fraction\n";
        // two passes: first to find the max of the filtered mean, then to emit
        std::vector<double> means(thresholds.size());
        for (std::size_t t = 0; t < thresholds.size(); ++t) {
            double sum = 0.0;
            int cnt = 0;
            for (const auto& c : r.cf_records) {
                if (c.sigma2_prime <= thresholds[t]) {
                    sum += std::fabs(*c.y_prime - c.y_hat_prime);
                    ++cnt;
                }
            }
            means[t] = cnt > 0 ? sum / cnt : 0.0;
            if (t + 1 == thresholds.size()) full_mean = means[t];
            max_mean = std::max(max_mean, means[t]);
        }
        for (std::size_t t = 0; t < thresholds.size(); ++t) {
            int cnt = 0, truthy = 0;
            for (const auto& c : r.cf_records) {
                if (c.sigma2_prime <= thresholds[t]) {
                    ++cnt;
                    truthy += *c.truthful_bit;
                }
            }
            double delta = max_mean > 0 ? (full_mean - means[t]) / max_mean : 0.0;
            delta = std::min(1.0, std::max(0.0, delta));
            double tr = cnt > 0 ? static_cast<double>(truthy) / cnt : std::nan("");
            double frac = static_cast<double>(cnt) / r.cf_records.size();
            double xin = smax > 0 ? thresholds[t] / smax : 1.0;
            csv << fmt(xin) << "," << fmt(thresholds[t]) << "," << fmt(delta) << "," << fmt(tr)
                << "," << fmt(frac) << "\n";
            cur.xi_norm.push_back(xin);
            cur.delta.push_back(delta);
            cur.tr.push_back(tr);
            cur.tr_def.push_back(cnt > 0);
            cur.frac.push_back(frac);
        }
        write_file(fs::path(out_dir) / ("cf_curves_rep" + std::to_string(r.rep) + ".csv"),
                   csv.str());
        curves.push_back(std::move(cur));
    }
    if (!curves.empty()) {
        std::ostringstream csv;
        csv << "# schema: molcf-cf-curve-v1\nxi_norm,delta_rel_mean,truthfulness,"
               "retained_fraction\n";
        for (int s = 0; s <= 100; ++s) {
            double xi = s / 100.0;
            double dsum = 0.0, fsum = 0.0, tsum = 0.0;
            int tcount = 0;
            for (const auto& c : curves) {
                dsum += step_eval(c.xi_norm, c.delta, xi);
                fsum += step_eval(c.xi_norm, c.frac, xi);
                auto it = std::upper_bound(c.xi_norm.begin(), c.xi_norm.end(), xi);
                std::size_t k = it == c.xi_norm.begin()
                                    ? 0
                                    : static_cast<std::size_t>(it - c.xi_norm.begin()) - 1;
                if (c.tr_def[k]) {
                    tsum += c.tr[k];
                    ++tcount;
                }
            }
            csv << fmt(xi) << "," << fmt(dsum / curves.size()) << ","
                << (tcount > 0 ? fmt(tsum / tcount) : "nan") << "," << fmt(fsum / curves.size())
                << "\n";
        }
        write_file(fs::path(out_dir) / "cf_curves_avg.csv", csv.str());
    }
}

std::string eval_records_to_jsonl(const std::vector<EvalArtifact>& records) {
    std::ostringstream out;
    out << json{{"schema", "molcf-eval-v1"}}.dump() << "\n";
    for (const auto& r : records) {
        json j;
        j["smiles"] = r.smiles;
        j["y"] = r.y;
        j["y_hat"] = r.y_hat;
        j["sigma2_raw"] = r.sigma2_raw;
        j["sigma2_cal"] = r.sigma2_cal;
        out << j.dump() << "\n";
    }
    return out.str();
}

std::vector<EvalArtifact> eval_records_from_jsonl(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || json::parse(line).value("schema", "") != "molcf-eval-v1")
        throw std::invalid_argument("unrecognized eval jsonl schema");
    std::vector<EvalArtifact> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        records.push_back({j.at("smiles"), j.at("y"), j.at("y_hat"), j.at("sigma2_raw"),
                           j.at("sigma2_cal")});
    }
    return records;
}

std::string dataset_to_jsonl(const std::vector<LabeledSample>& samples) {
    std::ostringstream out;
    out << json{{"schema", "molcf-dataset-v1"}}.dump() << "\n";
    for (const auto& s : samples) {
        json j;
        j["smiles"] = s.smiles;
        j["y"] = s.y;
        out << j.dump() << "\n";
    }
    return out.str();
}

std::vector<LabeledSample> dataset_from_jsonl(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || json::parse(line).value("schema", "") != "molcf-dataset-v1")
        throw std::invalid_argument("unrecognized dataset jsonl schema");
    std::vector<LabeledSample> samples;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        MolecularGraph g = parse_smiles(j.at("smiles").get<std::string>());
        samples.push_back({g, j.at("y"), write_smiles(g)});
    }
    if (samples.empty()) throw DatasetError("empty dataset file");
    return samples;
}

}  // namespace molcf
