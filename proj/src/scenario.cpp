#include "cloudedge/scenario.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace cloudedge {

namespace {

std::string trim(const std::string& s) {
    const std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string piece;
    std::istringstream in(s);
    while (std::getline(in, piece, sep)) out.push_back(trim(piece));
    return out;
}

[[noreturn]] void fail(const std::string& where, int line, const std::string& key,
                       const std::string& what) {
    std::ostringstream msg;
    msg << where << ":" << line << ": key '" << key << "': " << what;
    throw config_error(msg.str());
}

double to_double(const std::string& v) {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw config_error("trailing characters after number");
    return x;
}

int to_int(const std::string& v) {
    std::size_t used = 0;
    const int x = std::stoi(v, &used);
    if (used != v.size()) throw config_error("trailing characters after number");
    return x;
}

std::uint64_t to_u64(const std::string& v) {
    std::size_t used = 0;
    const unsigned long long x = std::stoull(v, &used);
    if (used != v.size()) throw config_error("trailing characters after number");
    return static_cast<std::uint64_t>(x);
}

using Setter = std::function<void(ScenarioFile&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"num_devices", [](ScenarioFile& s, const std::string& v) { s.config.num_devices = to_int(v); }},
        {"num_edges", [](ScenarioFile& s, const std::string& v) { s.config.num_edges = to_int(v); }},
        {"device_capacity_hz", [](ScenarioFile& s, const std::string& v) { s.config.device_capacity_hz = to_double(v); }},
        {"device_cycles_per_bit", [](ScenarioFile& s, const std::string& v) { s.config.device_cycles_per_bit = to_double(v); }},
        {"device_compute_power_w", [](ScenarioFile& s, const std::string& v) { s.config.device_compute_power_w = to_double(v); }},
        {"device_upload_power_w", [](ScenarioFile& s, const std::string& v) { s.config.device_upload_power_w = to_double(v); }},
        {"device_download_power_w", [](ScenarioFile& s, const std::string& v) { s.config.device_download_power_w = to_double(v); }},
        {"edge_capacity_hz", [](ScenarioFile& s, const std::string& v) { s.config.edge_capacity_hz = to_double(v); }},
        {"edge_cycles_per_bit", [](ScenarioFile& s, const std::string& v) { s.config.edge_cycles_per_bit = to_double(v); }},
        {"edge_upload_power_w", [](ScenarioFile& s, const std::string& v) { s.config.edge_upload_power_w = to_double(v); }},
        {"edge_download_power_w", [](ScenarioFile& s, const std::string& v) { s.config.edge_download_power_w = to_double(v); }},
        {"cloud_capacity_hz", [](ScenarioFile& s, const std::string& v) { s.config.cloud_capacity_hz = to_double(v); }},
        {"cloud_cycles_per_bit", [](ScenarioFile& s, const std::string& v) { s.config.cloud_cycles_per_bit = to_double(v); }},
        {"bandwidth_hz", [](ScenarioFile& s, const std::string& v) { s.config.bandwidth_hz = to_double(v); }},
        {"num_channels", [](ScenarioFile& s, const std::string& v) { s.config.num_channels = to_int(v); }},
        {"noise_power_w", [](ScenarioFile& s, const std::string& v) { s.config.noise_power_w = to_double(v); }},
        {"tx_power_w", [](ScenarioFile& s, const std::string& v) { s.config.tx_power_w = to_double(v); }},
        {"gain_min", [](ScenarioFile& s, const std::string& v) { s.config.gain_min = to_double(v); }},
        {"gain_max", [](ScenarioFile& s, const std::string& v) { s.config.gain_max = to_double(v); }},
        {"fiber_rate_bps", [](ScenarioFile& s, const std::string& v) { s.config.fiber_rate_bps = to_double(v); }},
        {"fiber_latency_s", [](ScenarioFile& s, const std::string& v) { s.config.fiber_latency_s = to_double(v); }},
        {"arrival_process",
         [](ScenarioFile& s, const std::string& v) {
             if (v == "poisson") s.config.arrival_process = ArrivalProcess::Poisson;
             else if (v == "periodic") s.config.arrival_process = ArrivalProcess::Periodic;
             else throw config_error("expected 'poisson' or 'periodic'");
         }},
        {"arrival_rate", [](ScenarioFile& s, const std::string& v) { s.config.arrival_rate = to_double(v); }},
        {"data_min_kb", [](ScenarioFile& s, const std::string& v) { s.config.data_min_kb = to_int(v); }},
        {"data_max_kb", [](ScenarioFile& s, const std::string& v) { s.config.data_max_kb = to_int(v); }},
        {"deadline_s", [](ScenarioFile& s, const std::string& v) { s.config.deadline_s = to_double(v); }},
        {"energy_budget_j", [](ScenarioFile& s, const std::string& v) { s.config.energy_budget_j = to_double(v); }},
        {"num_slots", [](ScenarioFile& s, const std::string& v) { s.config.num_slots = to_int(v); }},
        {"slot_length_s", [](ScenarioFile& s, const std::string& v) { s.config.slot_length_s = to_double(v); }},
        {"seed", [](ScenarioFile& s, const std::string& v) { s.config.seed = to_u64(v); }},
        {"strategy", [](ScenarioFile& s, const std::string& v) { s.config.strategy = parse_strategy(v); }},
        {"gamma1", [](ScenarioFile& s, const std::string& v) { s.config.gamma1 = to_double(v); }},
        {"ot_epsilon", [](ScenarioFile& s, const std::string& v) { s.config.ot.epsilon = to_double(v); }},
        {"ot_tolerance", [](ScenarioFile& s, const std::string& v) { s.config.ot.tolerance = to_double(v); }},
        {"ot_relaxation", [](ScenarioFile& s, const std::string& v) { s.config.ot.relaxation = to_double(v); }},
        {"ot_max_iterations", [](ScenarioFile& s, const std::string& v) { s.config.ot.max_iterations = to_int(v); }},
        {"ot_commit_fraction", [](ScenarioFile& s, const std::string& v) { s.config.ot.commit_fraction = to_double(v); }},
        {"ot_marginals",
         [](ScenarioFile& s, const std::string& v) {
             if (v == "bounded") s.config.ot.marginals = OtMarginals::CapacityBounded;
             else if (v == "fill") s.config.ot.marginals = OtMarginals::CapacityFill;
             else throw config_error("expected 'bounded' or 'fill'");
         }},
        {"sweep_rates",
         [](ScenarioFile& s, const std::string& v) {
             s.sweep_rates.clear();
             for (const std::string& piece : split(v, ','))
                 if (!piece.empty()) s.sweep_rates.push_back(to_double(piece));
             if (s.sweep_rates.empty()) throw config_error("empty rate list");
         }},
        {"sweep_strategies",
         [](ScenarioFile& s, const std::string& v) {
             s.sweep_strategies.clear();
             for (const std::string& piece : split(v, ','))
                 if (!piece.empty()) s.sweep_strategies.push_back(parse_strategy(piece));
             if (s.sweep_strategies.empty()) throw config_error("empty strategy list");
         }},
        {"sweep_seeds", [](ScenarioFile& s, const std::string& v) { s.sweep_seeds = to_int(v); }},
        {"output", [](ScenarioFile& s, const std::string& v) { s.output = v; }},
    };
    return table;
}

} // namespace

ScenarioFile parse_scenario(std::istream& in, const std::string& name) {
    ScenarioFile out;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string text = trim(raw);
        if (text.empty()) continue;

        const std::size_t eq = text.find('=');
        if (eq == std::string::npos)
            fail(name, line, text, "expected 'key = value'");
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) fail(name, line, key, "unknown key");
        if (value.empty()) fail(name, line, key, "missing value");
        try {
            it->second(out, value);
        } catch (const config_error& e) {
            fail(name, line, key, e.what());
        } catch (const std::exception&) {
            fail(name, line, key, "malformed value '" + value + "'");
        }
    }
    out.config.validate();
    if (out.sweep_seeds < 1)
        throw config_error(name + ": sweep_seeds must be at least 1");
    for (double r : out.sweep_rates)
        if (r < 0.0) throw config_error(name + ": sweep rates must be nonnegative");
    return out;
}

ScenarioFile load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open scenario file: " + path);
    return parse_scenario(in, path);
}

ScenarioFile desk_scenario() {
    ScenarioFile s;
    s.config.num_devices = 20;
    s.config.num_edges = 3;
    s.config.num_channels = 10;
    s.config.num_slots = 1000;
    s.output = "desk_results.csv";
    return s;
}

std::string describe(const ScenarioFile& s) {
    std::ostringstream out;
    const SimConfig& c = s.config;
    out << "num_devices = " << c.num_devices << "\n"
        << "num_edges = " << c.num_edges << "\n"
        << "device_capacity_hz = " << format_sig9(c.device_capacity_hz) << "\n"
        << "device_cycles_per_bit = " << format_sig9(c.device_cycles_per_bit) << "\n"
        << "device_compute_power_w = " << format_sig9(c.device_compute_power_w) << "\n"
        << "device_upload_power_w = " << format_sig9(c.device_upload_power_w) << "\n"
        << "device_download_power_w = " << format_sig9(c.device_download_power_w) << "\n"
        << "edge_capacity_hz = " << format_sig9(c.edge_capacity_hz) << "\n"
        << "edge_cycles_per_bit = " << format_sig9(c.edge_cycles_per_bit) << "\n"
        << "edge_upload_power_w = " << format_sig9(c.edge_upload_power_w) << "\n"
        << "edge_download_power_w = " << format_sig9(c.edge_download_power_w) << "\n"
        << "cloud_capacity_hz = " << format_sig9(c.cloud_capacity_hz) << "\n"
        << "cloud_cycles_per_bit = " << format_sig9(c.cloud_cycles_per_bit) << "\n"
        << "bandwidth_hz = " << format_sig9(c.bandwidth_hz) << "\n"
        << "num_channels = " << c.num_channels << "\n"
        << "noise_power_w = " << format_sig9(c.noise_power_w) << "\n"
        << "tx_power_w = " << format_sig9(c.tx_power_w) << "\n"
        << "gain_min = " << format_sig9(c.gain_min) << "\n"
        << "gain_max = " << format_sig9(c.gain_max) << "\n"
        << "fiber_rate_bps = " << format_sig9(c.fiber_rate_bps) << "\n"
        << "fiber_latency_s = " << format_sig9(c.fiber_latency_s) << "\n"
        << "arrival_process = "
        << (c.arrival_process == ArrivalProcess::Poisson ? "poisson" : "periodic") << "\n"
        << "arrival_rate = " << format_sig9(c.arrival_rate) << "\n"
        << "data_min_kb = " << c.data_min_kb << "\n"
        << "data_max_kb = " << c.data_max_kb << "\n"
        << "deadline_s = " << format_sig9(c.deadline_s) << "\n"
        << "energy_budget_j = " << format_sig9(c.energy_budget_j) << "\n"
        << "num_slots = " << c.num_slots << "\n"
        << "slot_length_s = " << format_sig9(c.slot_length_s) << "\n"
        << "seed = " << c.seed << "\n"
        << "strategy = " << strategy_name(c.strategy) << "\n"
        << "gamma1 = " << format_sig9(c.gamma1) << "\n"
        << "ot_epsilon = " << format_sig9(c.ot.epsilon) << "\n"
        << "ot_tolerance = " << format_sig9(c.ot.tolerance) << "\n"
        << "ot_relaxation = " << format_sig9(c.ot.relaxation) << "\n"
        << "ot_max_iterations = " << c.ot.max_iterations << "\n"
        << "ot_commit_fraction = " << format_sig9(c.ot.commit_fraction) << "\n"
        << "ot_marginals = "
        << (c.ot.marginals == OtMarginals::CapacityBounded ? "bounded" : "fill") << "\n";

    out << "sweep_rates = ";
    for (std::size_t i = 0; i < s.sweep_rates.size(); ++i)
        out << (i ? "," : "") << format_sig9(s.sweep_rates[i]);
    out << "\nsweep_strategies = ";
    for (std::size_t i = 0; i < s.sweep_strategies.size(); ++i)
        out << (i ? "," : "") << strategy_name(s.sweep_strategies[i]);
    out << "\nsweep_seeds = " << s.sweep_seeds << "\n"
        << "output = " << s.output << "\n";
    return out.str();
}

std::string format_sig9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::string csv_header() {
    return "strategy,seed,arrival_rate,avg_task_delay_s,processing_rate,"
           "peak_blocking_kb,final_blocking_kb,total_energy_j,offload_success_rate,"
           "ot_iterations_mean,ot_fallback_count";
}

std::string csv_row(const std::string& strategy, std::uint64_t seed, double arrival_rate,
                    const SimMetrics& m) {
    std::ostringstream out;
    out << strategy << ',' << seed << ',' << format_sig9(arrival_rate) << ','
        << format_sig9(m.avg_task_delay_s) << ',' << format_sig9(m.processing_rate) << ','
        << format_sig9(m.peak_blocking_kb) << ',' << format_sig9(m.final_blocking_kb)
        << ',' << format_sig9(m.total_energy_j) << ','
        << format_sig9(m.offload_success_rate) << ','
        << format_sig9(m.ot_iterations_mean) << ',' << m.ot_fallback_count;
    return out.str();
}

std::vector<SummaryRow> summarize(const std::vector<SweepPoint>& points) {
    std::vector<SummaryRow> rows;
    for (const SweepPoint& p : points) {
        SummaryRow* row = nullptr;
        for (SummaryRow& r : rows)
            if (r.strategy == p.strategy && r.arrival_rate == p.arrival_rate) row = &r;
        if (row == nullptr) {
            SummaryRow r;
            r.strategy = p.strategy;
            r.arrival_rate = p.arrival_rate;
            rows.push_back(r);
            row = &rows.back();
        }
        ++row->seeds;
        row->avg_task_delay_s += p.metrics.avg_task_delay_s;
        row->processing_rate += p.metrics.processing_rate;
        row->peak_blocking_kb += p.metrics.peak_blocking_kb;
        row->final_blocking_kb += p.metrics.final_blocking_kb;
        row->total_energy_j += p.metrics.total_energy_j;
        row->offload_success_rate += p.metrics.offload_success_rate;
        row->ot_iterations_mean += p.metrics.ot_iterations_mean;
        row->ot_fallback_mean += static_cast<double>(p.metrics.ot_fallback_count);
    }
    for (SummaryRow& r : rows) {
        const double n = static_cast<double>(r.seeds);
        r.avg_task_delay_s /= n;
        r.processing_rate /= n;
        r.peak_blocking_kb /= n;
        r.final_blocking_kb /= n;
        r.total_energy_j /= n;
        r.offload_success_rate /= n;
        r.ot_iterations_mean /= n;
        r.ot_fallback_mean /= n;
    }
    return rows;
}

std::string summary_header() {
    return "strategy,arrival_rate,seeds,avg_task_delay_s,processing_rate,"
           "peak_blocking_kb,final_blocking_kb,total_energy_j,offload_success_rate,"
           "ot_iterations_mean,ot_fallback_mean";
}

std::string summary_row(const SummaryRow& r) {
    std::ostringstream out;
    out << strategy_name(r.strategy) << ',' << format_sig9(r.arrival_rate) << ','
        << r.seeds << ',' << format_sig9(r.avg_task_delay_s) << ','
        << format_sig9(r.processing_rate) << ',' << format_sig9(r.peak_blocking_kb) << ','
        << format_sig9(r.final_blocking_kb) << ',' << format_sig9(r.total_energy_j) << ','
        << format_sig9(r.offload_success_rate) << ','
        << format_sig9(r.ot_iterations_mean) << ',' << format_sig9(r.ot_fallback_mean);
    return out.str();
}

} // namespace cloudedge
