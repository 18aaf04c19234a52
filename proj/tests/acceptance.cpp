// Acceptance suite: runs the project's release gates and prints one PASS/FAIL line
// per criterion. Heavy criteria (7-9) train full estimators and report wall time.
// Usage: acceptance [criterion-number]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <vector>

#include "molcf/experiment.hpp"
#include "molcf/rng.hpp"
#include "molcf/smiles.hpp"
#include "oracles.hpp"

using namespace molcf;
namespace fs = std::filesystem;

namespace {

struct Criterion {
    int number;
    const char* summary;
    std::function<bool(std::string&)> run;
};

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

// ---------------------------------------------------------------- criterion 1
bool criterion_rll_fixed_points(std::string& detail) {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> ue(0.2, 2.0);
    std::vector<double> errs(50);
    double mse = 0.0;
    for (double& e : errs) {
        e = ue(rng);
        mse += e * e;
    }
    mse /= errs.size();
    std::vector<EvalRecord> ideal, baseline;
    for (double e : errs) {
        ideal.push_back({0.0, e, e * e});
        baseline.push_back({0.0, e, mse});
    }
    double at_ideal = rll(ideal).value;
    double at_base = rll(baseline).value;
    std::ostringstream os;
    os << "RLL(sigma2=dy2)=" << at_ideal << " RLL(sigma2=RMSE2)=" << at_base;
    detail = os.str();
    return std::fabs(at_ideal - 1.0) <= 1e-9 && std::fabs(at_base) <= 1e-9;
}

// ---------------------------------------------------------------- criterion 2
bool criterion_uer_oracle(std::string& detail) {
    std::mt19937_64 rng(202);
    std::uniform_real_distribution<double> ue(0.0, 3.0), us(0.0, 2.0);
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
        int n = 1 + static_cast<int>(rng() % 50);
        std::vector<EvalRecord> recs;
        for (int i = 0; i < n; ++i)
            recs.push_back({0.0, ue(rng), rng() % 5 == 0 ? 0.0 : us(rng)});
        for (Accumulator g : {Accumulator::mean, Accumulator::max}) {
            double a = uer_curve(recs, g).auc;
            double b = testoracle::brute_force_uer_auc(recs, g);
            worst = std::max(worst, std::fabs(a - b));
        }
    }
    std::ostringstream os;
    os << "max |formula - brute force| = " << worst << " over 200 record sets";
    detail = os.str();
    return worst <= 1e-9;
}

// ---------------------------------------------------------------- criterion 3
bool criterion_uer_anchors(std::string& detail) {
    std::mt19937_64 rng(303);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<EvalRecord> perfect, indep;
    for (int i = 0; i < 10000; ++i) {
        double e = unit(rng);
        perfect.push_back({0.0, e, e});
        indep.push_back({0.0, e, unit(rng)});
    }
    double auc_perfect = uer_curve(perfect, Accumulator::mean).auc;
    double auc_indep = uer_curve(indep, Accumulator::mean).auc;
    std::ostringstream os;
    os << "AUC(sigma=err)=" << auc_perfect << " AUC(independent)=" << auc_indep;
    detail = os.str();
    return std::fabs(auc_perfect - 0.5) <= 0.03 && std::fabs(auc_indep) <= 0.05;
}

// ---------------------------------------------------------------- criterion 4
bool criterion_enumeration_oracle(std::string& detail) {
    MolecularGraph methane = parse_smiles("C");
    auto methane_neighbors = enumerate_1_edit(methane);
    if (methane_neighbors.size() != 12) {
        detail = "methane produced " + std::to_string(methane_neighbors.size()) + " neighbors";
        return false;
    }
    std::mt19937_64 rng(404);
    std::vector<MolecularGraph> seeds = {parse_smiles("C"), parse_smiles("N"), parse_smiles("O"),
                                         parse_smiles("F")};
    int checked = 0;
    for (int t = 0; checked < 100 && t < 1000; ++t) {
        std::uniform_int_distribution<int> pick(0, 3), steps(0, 4);
        MolecularGraph g = random_molecule(seeds[pick(rng)], steps(rng), rng);
        if (g.num_atoms() > 5) continue;
        ++checked;
        std::set<std::string> got;
        for (const auto& h : enumerate_1_edit(g)) got.insert(write_smiles(h));
        auto expected = testoracle::brute_force_1_edit(g);
        if (got != expected) {
            detail = "mismatch for " + write_smiles(g);
            return false;
        }
    }
    detail = "methane=12 neighbors; set equality on " + std::to_string(checked) +
             " random graphs <= 5 atoms";
    return checked == 100;
}

// ---------------------------------------------------------------- criterion 5
bool criterion_gradient_checks(std::string& detail) {
    const double h = 1e-5;
    auto bad = [&](double analytic, double fd) {
        return std::fabs(analytic - fd) >
               1e-4 * std::max({1.0, std::fabs(analytic), std::fabs(fd)});
    };
    std::vector<MolecularGraph> graphs = {parse_smiles("CCO"), parse_smiles("C=O"),
                                          parse_smiles("C1CC1")};
    std::vector<CompiledGraph> compiled;
    for (const auto& g : graphs) compiled.push_back(compile_graph(g));
    std::vector<const CompiledGraph*> ptrs;
    for (const auto& c : compiled) ptrs.push_back(&c);
    std::vector<double> targets{0.3, -1.2, 0.8};

    const double beta = 0.5;
    int checked = 0;
    for (auto arch : {Architecture::gcn, Architecture::gin, Architecture::gatv2lite}) {
        RegressorConfig rc{arch, 2, 6};
        for (bool mve : {false, true}) {
            ModelParams params = init_params(rc, mve, 500 + static_cast<int>(arch));
            LossKind kind = mve ? LossKind::mve : LossKind::mse;
            auto [loss, grad] = loss_and_gradient(params, rc, ptrs, targets, kind, beta);
            (void)loss;
            // finite differences of the stop-gradient objective: sg factors frozen
            // at the unperturbed parameters
            std::vector<double> sg0(ptrs.size(), 1.0);
            if (mve)
                for (std::size_t s = 0; s < ptrs.size(); ++s)
                    sg0[s] = std::pow(*forward(params, rc, *ptrs[s]).sigma2, beta);
            auto frozen_value = [&](const ModelParams& p) {
                double total = 0.0;
                for (std::size_t s = 0; s < ptrs.size(); ++s) {
                    Prediction pr = forward(p, rc, *ptrs[s]);
                    double dy = targets[s] - pr.y_hat;
                    if (!mve) {
                        total += dy * dy;
                    } else {
                        double s2 = *pr.sigma2;
                        total += sg0[s] / 2.0 * (dy * dy / s2 + std::log(s2));
                    }
                }
                return total / static_cast<double>(ptrs.size());
            };
            ModelParams p = params;
            for (std::size_t k = 0; k < p.values.size(); ++k) {
                double orig = p.values[k];
                p.values[k] = orig + h;
                double up = frozen_value(p);
                p.values[k] = orig - h;
                double down = frozen_value(p);
                p.values[k] = orig;
                ++checked;
                if (bad(grad[k], (up - down) / (2 * h))) {
                    std::ostringstream os;
                    os << to_string(arch) << (mve ? "/mve" : "/mse") << " param " << k
                       << ": analytic " << grad[k] << " vs fd " << (up - down) / (2 * h);
                    detail = os.str();
                    return false;
                }
            }
        }
    }
    detail = std::to_string(checked) + " parameter derivatives across 3 architectures x 2 losses";
    return true;
}

// ---------------------------------------------------------------- criterion 6
bool criterion_isotonic_oracle(std::string& detail) {
    std::mt19937_64 rng(606);
    std::uniform_real_distribution<double> ue(0.0, 4.0);
    double worst = 0.0;
    for (int t = 0; t < 300; ++t) {
        int n = 2 + static_cast<int>(rng() % 5);
        std::vector<std::pair<double, double>> pairs;
        std::vector<double> ys, ws(n, 1.0);
        for (int i = 0; i < n; ++i) {
            double e = ue(rng);
            pairs.emplace_back(i, e);
            ys.push_back(e);
        }
        IsotonicMap map = fit_isotonic(pairs);
        auto oracle = testoracle::exhaustive_monotone_lsq(ys, ws);
        if (!oracle) {
            detail = "oracle unavailable";
            return false;
        }
        for (int i = 0; i < n; ++i) worst = std::max(worst, std::fabs(map.values[i] - (*oracle)[i]));
    }
    std::ostringstream os;
    os << "max |pava - exhaustive| = " << worst << " over 300 instances";
    detail = os.str();
    return worst <= 1e-9;
}

// ------------------------------------------------------------ experiment glue
Config experiment_base_config(const std::string& out_dir) {
    Config cfg;
    cfg.set("dataset.source", "synthetic");
    cfg.set("dataset.n", "2000");
    cfg.set("dataset.max_steps", "16");
    cfg.set("model.arch", "gin");
    cfg.set("model.layers", "3");
    cfg.set("model.hidden", "32");
    cfg.set("train.epochs", "160");
    cfg.set("train.learning_rate", "0.01");
    cfg.set("train.batch_size", "32");
    cfg.set("train.grad_clip_norm", "5.0");
    cfg.set("train.mve_beta", "0.5");
    cfg.set("train.mve_warmup_epochs", "50");
    cfg.set("estimator.ensemble_size", "3");
    cfg.set("run.repetitions", "3");
    cfg.set("run.master_seed", "7");
    cfg.set("run.out_dir", out_dir);
    cfg.set("split.kind", "iid");
    cfg.set("split.train", "0.8");
    cfg.set("split.calibration", "0.1");
    cfg.set("split.test", "0.1");
    cfg.set("counterfactual.enabled", "false");
    return cfg;
}

double aggregate_mean(const ExperimentReport& rep, const char* key) {
    return rep.report.at("aggregate").at(key).at("mean").get<double>();
}

fs::path acceptance_dir() {
    fs::path p = fs::temp_directory_path() / "molcf_acceptance";
    fs::create_directories(p);
    return p;
}

// ---------------------------------------------------------------- criterion 7
bool criterion_table1_directional(std::string& detail) {
    fs::path dir = acceptance_dir();

    Config random_cfg = experiment_base_config((dir / "random").string());
    random_cfg.set("estimator.kind", "random");
    ExperimentReport random_rep = run_experiment(ExperimentConfig::from_config(random_cfg));

    Config demve_cfg = experiment_base_config((dir / "de_mve").string());
    demve_cfg.set("estimator.kind", "de_mve");
    ExperimentReport demve_rep = run_experiment(ExperimentConfig::from_config(demve_cfg));

    double random_auc = aggregate_mean(random_rep, "uer_auc_mean");
    double demve_auc = aggregate_mean(demve_rep, "uer_auc_mean");
    double demve_rho = aggregate_mean(demve_rep, "rho");
    std::ostringstream os;
    os << "random UER-AUC_mean=" << random_auc << " de_mve UER-AUC_mean=" << demve_auc
       << " de_mve rho=" << demve_rho;
    detail = os.str();
    return random_auc >= -0.05 && random_auc <= 0.1 && demve_auc >= random_auc + 0.1 &&
           demve_rho >= 0.2;
}

// ---------------------------------------------------------------- criterion 8
bool criterion_table2_directional(std::string& detail) {
    fs::path dir = acceptance_dir();

    Config iid_cfg = experiment_base_config((dir / "de_iid").string());
    iid_cfg.set("estimator.kind", "de");
    ExperimentReport iid_rep = run_experiment(ExperimentConfig::from_config(iid_cfg));

    Config ood_cfg = experiment_base_config((dir / "de_oodv").string());
    ood_cfg.set("estimator.kind", "de");
    ood_cfg.set("split.kind", "ood_value");
    ExperimentReport ood_rep = run_experiment(ExperimentConfig::from_config(ood_cfg));

    double iid_auc = aggregate_mean(iid_rep, "uer_auc_mean");
    double ood_auc = aggregate_mean(ood_rep, "uer_auc_mean");
    std::ostringstream os;
    os << "de UER-AUC_mean iid=" << iid_auc << " ood_value=" << ood_auc;
    detail = os.str();
    return ood_auc >= iid_auc + 0.1;
}

// ---------------------------------------------------------------- criterion 9
bool criterion_truthfulness(std::string& detail) {
    fs::path dir = acceptance_dir();
    Config cfg = experiment_base_config((dir / "truthfulness").string());
    cfg.set("estimator.kind", "de_mve");
    cfg.set("split.train", "0.7");
    cfg.set("split.calibration", "0.2");
    cfg.set("split.test", "0.1");
    cfg.set("counterfactual.enabled", "true");
    cfg.set("counterfactual.n_originals", "50");
    cfg.set("counterfactual.top_k", "10");
    cfg.set("counterfactual.retention", "0.2");
    ExperimentReport rep = run_experiment(ExperimentConfig::from_config(cfg));

    std::vector<double> tr_initials, tr_at_5pct, gains;
    for (const auto& r : rep.reps) {
        if (!r.ok || !r.cf_present || r.cf_records.empty()) continue;
        if (r.cf.tr_initial_defined) tr_initials.push_back(r.cf.tr_initial);
        if (r.cf.tr_gain_defined) gains.push_back(r.cf.tr_gain);
        std::vector<double> sigmas;
        for (const auto& c : r.cf_records) sigmas.push_back(c.sigma2_prime);
        RetentionThreshold thr5 = retention_threshold(sigmas, 0.05);
        std::vector<int> bits;
        for (const auto& c : r.cf_records)
            if (c.sigma2_prime <= thr5.xi) bits.push_back(*c.truthful_bit);
        TruthfulnessResult tr5 = relative_truthfulness(bits);
        if (tr5.defined) tr_at_5pct.push_back(tr5.value);
    }
    if (tr_initials.empty() || tr_at_5pct.empty() || gains.empty()) {
        detail = "no defined truthfulness values across repetitions";
        return false;
    }
    auto mean = [](const std::vector<double>& xs) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s / xs.size();
    };
    double m_init = mean(tr_initials), m_5 = mean(tr_at_5pct), m_gain = mean(gains);
    std::ostringstream os;
    os << "Tr(unfiltered)=" << m_init << " Tr(5% retained)=" << m_5 << " Tr gain at xi20="
       << m_gain;
    detail = os.str();
    return m_5 >= m_init && m_gain >= 0.0;
}

// --------------------------------------------------------------- criterion 10
bool criterion_determinism(std::string& detail) {
    fs::path dir = acceptance_dir() / "det";
    fs::remove_all(dir);
    Config cfg = experiment_base_config(dir.string());
    cfg.set("dataset.n", "80");
    cfg.set("dataset.max_steps", "5");
    cfg.set("model.arch", "gcn");
    cfg.set("model.layers", "2");
    cfg.set("model.hidden", "8");
    cfg.set("train.epochs", "12");
    cfg.set("train.mve_warmup_epochs", "4");
    cfg.set("estimator.kind", "de_mve");
    cfg.set("estimator.ensemble_size", "2");
    cfg.set("run.repetitions", "2");
    cfg.set("split.train", "0.7");
    cfg.set("split.calibration", "0.2");
    cfg.set("split.test", "0.1");
    cfg.set("counterfactual.enabled", "true");
    cfg.set("counterfactual.n_originals", "3");
    cfg.set("counterfactual.top_k", "5");

    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };
    const std::vector<std::string> files = {
        "report.json",      "eval_records_rep0.jsonl", "eval_records_rep1.jsonl",
        "counterfactuals_rep0.jsonl", "cf_curves_rep0.csv",      "uer_mean_rep0.csv",
        "uer_mean_avg.csv", "cf_curves_avg.csv"};

    run_experiment(ExperimentConfig::from_config(cfg));
    std::map<std::string, std::string> first;
    for (const auto& f : files) first[f] = slurp(dir / f);

    run_experiment(ExperimentConfig::from_config(cfg));
    for (const auto& f : files) {
        std::string again = slurp(dir / f);
        if (again.empty() || again != first[f]) {
            detail = "file differs or missing on rerun: " + f;
            return false;
        }
    }
    detail = "rerun with identical config and seed is byte-identical across " +
             std::to_string(files.size()) + " artifacts";
    return true;
}

const std::vector<Criterion> kCriteria = {
    {1, "RLL fixed points exact to 1e-9", criterion_rll_fixed_points},
    {2, "UER-AUC equals brute-force recomputation (200 sets, 1e-9)", criterion_uer_oracle},
    {3, "UER-AUC anchors: 0.5 for sigma=error, 0 for independent sigma", criterion_uer_anchors},
    {4, "1-edit enumeration equals brute-force grammar (100 graphs; methane=12)",
     criterion_enumeration_oracle},
    {5, "gradient checks: 3 architectures x {MSE, MVE} vs central differences",
     criterion_gradient_checks},
    {6, "isotonic regression matches exhaustive monotone least squares",
     criterion_isotonic_oracle},
    {7, "directional IID reproduction: random in [-0.05,0.1]; DE+MVE >= random+0.1, rho >= 0.2",
     criterion_table1_directional},
    {8, "directional OOD-value reproduction: DE UER-AUC_mean gains >= 0.1 over IID",
     criterion_table2_directional},
    {9, "truthfulness: Tr at 5% retention >= unfiltered; gain at xi20 >= 0 (DE+MVE)",
     criterion_truthfulness},
    {10, "determinism: identical config and seed give byte-identical reports",
     criterion_determinism},
};

}  // namespace

int main(int argc, char** argv) {
    int only = argc > 1 ? std::atoi(argv[1]) : 0;
    int failures = 0;
    for (const auto& c : kCriteria) {
        if (only != 0 && c.number != only) continue;
        double t0 = now_seconds();
        std::string detail;
        bool ok = false;
        try {
            ok = c.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        double dt = now_seconds() - t0;
        std::printf("%s  criterion %2d (%.1fs): %s [%s]\n", ok ? "PASS" : "FAIL", c.number, dt,
                    c.summary, detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    return failures;
}
