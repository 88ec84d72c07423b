#include "scalemix/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "scalemix/errors.hpp"
#include "scalemix/rng.hpp"

namespace scalemix {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double grid_mse(const std::vector<double>& values, const std::vector<double>& truth) {
    double acc = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double d = values[i] - truth[i];
        acc += d * d;
    }
    return acc / static_cast<double>(values.size());
}

void clip_unit(std::vector<double>& values) {
    for (double& v : values) v = std::clamp(v, 0.0, 1.0);
}

// Runs indexed tasks on `workers` threads; results land in pre-assigned
// slots, so scheduling cannot change the output. The first failure is
// rethrown with run context attached.
void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t)>& task) {
    if (workers <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto body = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                task(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(count);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const unsigned spawn = std::min<unsigned>(workers, static_cast<unsigned>(count));
    pool.reserve(spawn);
    for (unsigned w = 0; w < spawn; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace

void validate(const ExperimentConfig& cfg) {
    if (cfg.runs == 0) throw ConfigError("experiment needs runs >= 1");
    if (cfg.n_values.empty()) throw ConfigError("experiment needs at least one sample size");
    for (const std::size_t n : cfg.n_values)
        if (n == 0) throw ConfigError("sample sizes must be >= 1");
    if (!(cfg.grid.lo > 0.0) || !(cfg.grid.hi > cfg.grid.lo) || cfg.grid.points == 0)
        throw ConfigError("experiment grid must satisfy 0 < lo < hi, points >= 1");
    if (cfg.methods.empty()) throw ConfigError("experiment needs at least one method");
    for (const auto& m : cfg.methods)
        if (m != "mellin" && m != "fourier")
            throw ConfigError("unknown method '" + m + "' (expected mellin or fourier)");
    validate(cfg.model.signal);
    validate(cfg.model.mixing);
}

double ExperimentResult::avg(const std::string& method, std::size_t n) const {
    for (const auto& row : table)
        if (row.method == method && row.n == n) return row.avg_mse;
    throw ConfigError("no MSE row for method '" + method + "' at n = " + std::to_string(n));
}

std::vector<double> experiment_grid(const ExperimentConfig& cfg) {
    return linspace(cfg.grid.lo, cfg.grid.hi, cfg.grid.points);
}

std::string scenario_canonical_string(const ExperimentConfig& cfg) {
    std::ostringstream os;
    os << cfg.label << "|F=" << format_spec(cfg.model.signal)
       << "|G=" << format_spec(cfg.model.mixing) << "|n=";
    for (const std::size_t n : cfg.n_values) os << n << ",";
    os << "|runs=" << cfg.runs << "|grid=" << fmt17(cfg.grid.lo) << ":" << fmt17(cfg.grid.hi)
       << ":" << cfg.grid.points << "|u=" << fmt17(cfg.mellin.u_star)
       << "|T=" << (cfg.mellin_T_equals_n ? std::string("n") : fmt17(cfg.mellin.truncation))
       << "|clip=" << (cfg.mellin.clip_to_unit ? 1 : 0) << "|R=" << fmt17(cfg.fourier.cutoff)
       << "|h=" << fmt17(cfg.fourier.bandwidth);
    return os.str();
}

std::uint64_t scenario_hash(const ExperimentConfig& cfg) {
    const std::string s = scenario_canonical_string(cfg);
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (const unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace {

EstimatorConfig mellin_config_for(const ExperimentConfig& cfg, std::size_t n) {
    EstimatorConfig m = cfg.mellin;
    if (cfg.mellin_T_equals_n) m.truncation = static_cast<double>(n);
    return m;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, unsigned workers) {
    validate(cfg);
    const std::vector<double> grid = experiment_grid(cfg);
    std::vector<double> truth(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) truth[i] = cdf(cfg.model.signal, grid[i]);

    const std::uint64_t run_base = mix_seed(cfg.seed, scenario_hash(cfg));
    const bool want_mellin =
        std::find(cfg.methods.begin(), cfg.methods.end(), "mellin") != cfg.methods.end();
    const bool want_fourier =
        std::find(cfg.methods.begin(), cfg.methods.end(), "fourier") != cfg.methods.end();

    struct Slot {
        double mellin = 0.0, fourier = 0.0;
    };
    std::vector<Slot> slots(cfg.n_values.size() * cfg.runs);

    std::vector<std::size_t> task_n(slots.size());
    std::vector<std::size_t> task_run(slots.size());
    for (std::size_t ni = 0; ni < cfg.n_values.size(); ++ni)
        for (std::size_t r = 0; r < cfg.runs; ++r) {
            task_n[ni * cfg.runs + r] = ni;
            task_run[ni * cfg.runs + r] = r;
        }

    parallel_for(slots.size(), workers, [&](std::size_t idx) {
        const std::size_t ni = task_n[idx];
        const std::size_t r = task_run[idx];
        const std::size_t n = cfg.n_values[ni];
        const std::uint64_t run_seed = mix_seed(run_base, idx);
        try {
            const Sample sample = sample_mixture(cfg.model, n, run_seed);
            if (want_mellin) {
                const CdfEstimate est =
                    estimate_cdf(sample, cfg.model.mixing, mellin_config_for(cfg, n), grid);
                slots[idx].mellin = grid_mse(est.values, truth);
            }
            if (want_fourier) {
                CdfEstimate est =
                    fourier_estimate_cdf(sample, cfg.model.mixing, cfg.fourier, grid);
                clip_unit(est.values);  // c.d.f. comparison regime
                slots[idx].fourier = grid_mse(est.values, truth);
            }
        } catch (const Error& e) {
            throw Error(e.category(), "run " + std::to_string(r) + " (n = " +
                                          std::to_string(n) + "): " + e.what());
        }
    });

    ExperimentResult result;
    result.cfg = cfg;
    for (std::size_t ni = 0; ni < cfg.n_values.size(); ++ni) {
        const std::size_t n = cfg.n_values[ni];
        for (const auto& method : cfg.methods) {
            double mean = 0.0;
            for (std::size_t r = 0; r < cfg.runs; ++r) {
                const Slot& s = slots[ni * cfg.runs + r];
                const double mse = method == "mellin" ? s.mellin : s.fourier;
                mean += mse;
                result.run_mse.push_back({method, n, r, mse});
            }
            mean /= static_cast<double>(cfg.runs);
            double var = 0.0;
            for (std::size_t r = 0; r < cfg.runs; ++r) {
                const Slot& s = slots[ni * cfg.runs + r];
                const double mse = method == "mellin" ? s.mellin : s.fourier;
                var += (mse - mean) * (mse - mean);
            }
            const double sd = cfg.runs > 1 ? std::sqrt(var / static_cast<double>(cfg.runs - 1))
                                           : 0.0;
            result.table.push_back({cfg.label, n, method, mean, sd, cfg.runs, cfg.seed});
        }
    }
    return result;
}

std::vector<ProfilePoint> risk_profile(const ExperimentConfig& cfg, const std::string& vary,
                                       const std::vector<double>& values, unsigned workers) {
    validate(cfg);
    if (values.empty()) throw ConfigError("risk profile needs at least one varied value");
    if (vary != "x" && vary != "u_star")
        throw ConfigError("risk profile varies 'x' or 'u_star'");
    const std::size_t n = cfg.n_values.back();

    if (vary == "u_star") {
        try {
            const HgRegion region = hg_region(cfg.model.mixing);
            if (region.kind == HgKind::punctured_line)
                for (const double u : values)
                    if (u == region.u_excluded)
                        throw FeasibilityError(
                            "u_star = " + std::to_string(u) +
                            " is the excluded line of the mixing law; |M[G]| is not "
                            "separated from zero there");
        } catch (const UnsupportedFamilyError&) {
        }
        for (const double u : values) {
            if (!(u < 1.0)) throw ConfigError("u_star values must be < 1");
            if (!strip(cfg.model.signal).contains(u))
                throw StripError("u_star value outside the strip of the signal law");
        }
    } else {
        for (const double x : values)
            if (!(x >= 1e-6)) throw DomainError("profile x values must be >= 1e-6");
    }

    const std::uint64_t run_base = mix_seed(cfg.seed, scenario_hash(cfg) ^ 0x70726f66ULL);
    std::vector<ProfilePoint> out(values.size() * cfg.runs);

    parallel_for(cfg.runs, workers, [&](std::size_t r) {
        const Sample sample = sample_mixture(cfg.model, n, mix_seed(run_base, r));
        if (vary == "x") {
            EstimatorConfig m = mellin_config_for(cfg, n);
            const CdfEstimate est = estimate_cdf(sample, cfg.model.mixing, m, values);
            for (std::size_t i = 0; i < values.size(); ++i) {
                const double truth = cdf(cfg.model.signal, values[i]);
                out[i * cfg.runs + r] = {values[i], r,
                                         pointwise_risk(est.values[i], truth, m.u_star,
                                                        values[i])};
            }
        } else {
            const double x_fixed = 0.5;
            const double truth = cdf(cfg.model.signal, x_fixed);
            for (std::size_t i = 0; i < values.size(); ++i) {
                EstimatorConfig m = mellin_config_for(cfg, n);
                m.u_star = values[i];
                const CdfEstimate est =
                    estimate_cdf(sample, cfg.model.mixing, m, {x_fixed});
                out[i * cfg.runs + r] = {values[i], r,
                                         pointwise_risk(est.values[0], truth, m.u_star,
                                                        x_fixed)};
            }
        }
    });
    return out;
}

double oracle_tune(const ExperimentConfig& cfg, const std::string& method,
                   const std::string& parameter, const std::vector<double>& grid_values,
                   std::size_t tuning_runs, unsigned workers) {
    validate(cfg);
    if (grid_values.empty()) throw ConfigError("oracle tuning needs a non-empty grid");
    if (tuning_runs == 0) throw ConfigError("oracle tuning needs tuning_runs >= 1");
    if (method != "mellin" && method != "fourier")
        throw ConfigError("oracle tuning method must be mellin or fourier");
    const bool is_T = parameter == "T";
    const bool is_R = parameter == "R" || parameter == "R_n";
    const bool is_h = parameter == "h";
    if (!(is_T || is_R || is_h))
        throw ConfigError("tunable parameters are T, R_n and h");
    if (is_T && method != "mellin") throw ConfigError("T is a parameter of the mellin method");
    if ((is_R || is_h) && method != "fourier")
        throw ConfigError("R_n and h are parameters of the fourier method");

    const std::size_t n = cfg.n_values.back();
    const std::vector<double> grid = experiment_grid(cfg);
    std::vector<double> truth(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) truth[i] = cdf(cfg.model.signal, grid[i]);

    const std::uint64_t tune_base = mix_seed(cfg.seed, scenario_hash(cfg) ^ 0x74756e65ULL);

    // fresh samples, shared across candidate parameter values
    std::vector<Sample> samples;
    samples.reserve(tuning_runs);
    for (std::size_t r = 0; r < tuning_runs; ++r)
        samples.push_back(sample_mixture(cfg.model, n, mix_seed(tune_base, r)));

    double best_value = grid_values.front();
    double best_mse = std::numeric_limits<double>::infinity();
    for (const double candidate : grid_values) {
        std::vector<double> mses(tuning_runs, 0.0);
        parallel_for(tuning_runs, workers, [&](std::size_t r) {
            if (method == "mellin") {
                EstimatorConfig m = mellin_config_for(cfg, n);
                if (is_T) m.truncation = candidate;
                const CdfEstimate est = estimate_cdf(samples[r], cfg.model.mixing, m, grid);
                mses[r] = grid_mse(est.values, truth);
            } else {
                FourierConfig f = cfg.fourier;
                if (is_R) f.cutoff = candidate;
                if (is_h) f.bandwidth = candidate;
                CdfEstimate est = fourier_estimate_cdf(samples[r], cfg.model.mixing, f, grid);
                clip_unit(est.values);
                mses[r] = grid_mse(est.values, truth);
            }
        });
        double mean = 0.0;
        for (const double m : mses) mean += m;
        mean /= static_cast<double>(tuning_runs);
        if (mean < best_mse) {  // strict: ties stay with the smaller parameter
            best_mse = mean;
            best_value = candidate;
        }
    }
    return best_value;
}

ExperimentConfig preset_scenario(const std::string& name) {
    ExperimentConfig cfg;
    cfg.label = name;
    cfg.mellin.u_star = 0.5;
    cfg.mellin.clip_to_unit = true;
    cfg.fourier.bandwidth = 0.0;

    const bool beta_signal = name.size() > 5 && name.substr(name.size() - 5) == "-beta";
    const bool gamma_signal = name.size() > 6 && name.substr(name.size() - 6) == "-gamma";
    if (beta_signal) {
        cfg.model.signal = Beta{2.0, 2.0};
        cfg.grid = {0.01, 0.99, 100};
    } else if (gamma_signal) {
        cfg.model.signal = Gamma{2.0, 2.0};
        cfg.grid = {0.01, quantile(Gamma{2.0, 2.0}, 0.99), 100};
    } else {
        throw ConfigError("unknown scenario '" + name + "'");
    }

    if (name.rfind("twopoint-", 0) == 0) {
        cfg.model.mixing = FiniteDiscrete{{{1.0, 1.0 / 3.0}, {2.0, 2.0 / 3.0}}};
        cfg.mellin_T_equals_n = true;
        cfg.mellin.truncation = 1000.0;
        cfg.fourier.cutoff = beta_signal ? 3.5 : 9.7;
    } else if (name.rfind("zeta-", 0) == 0) {
        cfg.model.mixing = Zeta{5.0};
        cfg.mellin.truncation = 1000.0;
        cfg.fourier.cutoff = beta_signal ? 9.6 : 45.4;
    } else if (name.rfind("uniform-", 0) == 0) {
        cfg.model.mixing = UniformUnit{};
        cfg.mellin.truncation = beta_signal ? 34.6 : 29.7;
        cfg.fourier.cutoff = beta_signal ? 9.7 : 3.4;
    } else {
        throw ConfigError("unknown scenario '" + name + "'");
    }
    return cfg;
}

ExperimentConfig load_scenario_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open scenario file '" + path + "'");
    ExperimentConfig cfg;
    bool have_signal = false, have_mixing = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                throw DataError("scenario file line " + std::to_string(line_no) +
                                ": expected key = value");
            continue;
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "label") {
                cfg.label = value;
            } else if (key == "signal") {
                cfg.model.signal = parse_spec(value);
                have_signal = true;
            } else if (key == "mixing") {
                cfg.model.mixing = parse_spec(value);
                have_mixing = true;
            } else if (key == "n") {
                cfg.n_values.clear();
                std::stringstream ss(value);
                std::string tok;
                while (std::getline(ss, tok, ','))
                    cfg.n_values.push_back(std::stoull(tok));
            } else if (key == "runs") {
                cfg.runs = std::stoull(value);
            } else if (key == "seed") {
                cfg.seed = std::stoull(value);
            } else if (key == "grid") {
                std::stringstream ss(value);
                std::string lo, hi, pts;
                if (!std::getline(ss, lo, ':') || !std::getline(ss, hi, ':') ||
                    !std::getline(ss, pts, ':'))
                    throw DataError("grid expects lo:hi:points");
                cfg.grid = {std::stod(lo), std::stod(hi),
                            static_cast<std::size_t>(std::stoull(pts))};
            } else if (key == "u_star") {
                cfg.mellin.u_star = std::stod(value);
            } else if (key == "T") {
                if (value == "n") {
                    cfg.mellin_T_equals_n = true;
                } else {
                    cfg.mellin_T_equals_n = false;
                    cfg.mellin.truncation = std::stod(value);
                }
            } else if (key == "panels") {
                cfg.mellin.panels = std::stoull(value);
                cfg.fourier.panels = cfg.mellin.panels;
            } else if (key == "clip") {
                cfg.mellin.clip_to_unit = value == "1" || value == "true";
            } else if (key == "fourier_R") {
                cfg.fourier.cutoff = std::stod(value);
            } else if (key == "fourier_h") {
                cfg.fourier.bandwidth = std::stod(value);
            } else if (key == "anchor_quantile") {
                cfg.fourier.anchor_quantile = std::stod(value);
            } else if (key == "methods") {
                cfg.methods.clear();
                std::stringstream ss(value);
                std::string tok;
                while (std::getline(ss, tok, ',')) cfg.methods.push_back(trim(tok));
            } else {
                throw DataError("unknown scenario key '" + key + "'");
            }
        } catch (const Error&) {
            throw;
        } catch (const std::exception& e) {
            throw DataError("scenario file line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!have_signal || !have_mixing)
        throw DataError("scenario file must set both signal and mixing");
    validate(cfg);
    return cfg;
}

void write_mse_csv(std::ostream& os, const ExperimentResult& result) {
    os << "mixing,n,method,avg_mse,sd_mse,runs,seed\n";
    for (const auto& row : result.table)
        os << row.mixing << "," << row.n << "," << row.method << "," << fmt17(row.avg_mse)
           << "," << fmt17(row.sd_mse) << "," << row.runs << "," << row.seed << "\n";
}

void write_runs_csv(std::ostream& os, const ExperimentResult& result) {
    os << "method,n,run,mse\n";
    for (const auto& rec : result.run_mse)
        os << rec.method << "," << rec.n << "," << rec.run << "," << fmt17(rec.mse) << "\n";
}

void write_profile_csv(std::ostream& os, const std::string& vary,
                       const std::vector<ProfilePoint>& points) {
    os << "varied,value,run,risk\n";
    for (const auto& p : points)
        os << vary << "," << fmt17(p.value) << "," << p.run << "," << fmt17(p.risk) << "\n";
}

std::string summary_json(const ExperimentResult& result) {
    nlohmann::json j;
    j["scenario"] = result.cfg.label;
    j["signal"] = format_spec(result.cfg.model.signal);
    j["mixing"] = format_spec(result.cfg.model.mixing);
    j["seed"] = result.cfg.seed;
    j["runs"] = result.cfg.runs;
    j["grid"] = {{"lo", result.cfg.grid.lo},
                 {"hi", result.cfg.grid.hi},
                 {"points", result.cfg.grid.points}};
    j["clip_to_unit"] = result.cfg.mellin.clip_to_unit;
    j["u_star"] = result.cfg.mellin.u_star;
    j["T_rule"] = result.cfg.mellin_T_equals_n ? "n" : fmt17(result.cfg.mellin.truncation);
    j["rows"] = nlohmann::json::array();
    for (const auto& row : result.table)
        j["rows"].push_back({{"mixing", row.mixing},
                             {"n", row.n},
                             {"method", row.method},
                             {"avg_mse", row.avg_mse},
                             {"sd_mse", row.sd_mse},
                             {"runs", row.runs},
                             {"seed", row.seed}});
    return j.dump(2);
}

}  // namespace scalemix
