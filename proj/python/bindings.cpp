#include "emgvalid/agreement.hpp"
#include "emgvalid/cli.hpp"
#include "emgvalid/comms.hpp"
#include "emgvalid/mech.hpp"
#include "emgvalid/report.hpp"
#include "emgvalid/safety.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace emgvalid;

namespace {

// Results cross the boundary as canonical JSON text; the Python package decodes them.
std::string dump(const nlohmann::json& j) { return report::dump_canonical(j); }

ComplianceThresholds thresholds(double leakage_limit, double auxiliary_limit, double multiplier) {
    ComplianceThresholds t;
    t.leakage_limit_ua = leakage_limit;
    t.auxiliary_limit_ua = auxiliary_limit;
    t.marginal_multiplier = multiplier;
    t.validate();
    return t;
}

py::bytes as_bytes(const std::vector<std::uint8_t>& v) {
    return py::bytes(reinterpret_cast<const char*>(v.data()), v.size());
}

std::vector<std::uint8_t> from_bytes(const py::bytes& b) {
    const std::string s = b;
    return {s.begin(), s.end()};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "sEMG device validation toolkit";
    m.attr("__version__") = report::kToolkitVersion;
    m.attr("SCHEMA_VERSION") = report::kSchemaVersion;

    py::register_exception<Error>(m, "EmgValidError", PyExc_ValueError);

    m.def("descriptive_stats", [](const std::vector<double>& xs, int decimals) {
        return dump(report::stats_json(descriptive_stats(xs), decimals));
    }, py::arg("values"), py::arg("decimals") = 4);

    m.def("assess_leakage",
          [](const std::vector<std::vector<double>>& rows, std::vector<std::string> labels, bool worst_case,
             double limit, double multiplier) {
              if (labels.empty())
                  for (std::size_t i = 0; i < rows.size(); ++i) labels.push_back(std::to_string(i + 1));
              const auto a = safety::assess_leakage({labels, rows}, thresholds(limit, 100.0, multiplier),
                                                    worst_case ? safety::VerdictBasis::WorstRepetition
                                                               : safety::VerdictBasis::Mean);
              return dump(report::leakage_json(a));
          },
          py::arg("rows"), py::arg("labels") = std::vector<std::string>{}, py::arg("worst_case") = false,
          py::arg("limit_ua") = 10.0, py::arg("marginal_multiplier") = 2.0);

    m.def("assess_auxiliary",
          [](const std::vector<double>& values, double limit, double multiplier) {
              const auto t = thresholds(10.0, limit, multiplier);
              return dump(report::auxiliary_json(safety::assess_auxiliary(values, t), t));
          },
          py::arg("values"), py::arg("limit_ua") = 100.0, py::arg("marginal_multiplier") = 2.0);

    m.def("window_features", [](const std::vector<double>& w) {
        const auto f = agreement::window_features(w);
        return std::map<std::string, double>{{"rms", f.rms}, {"mav", f.mav}, {"iemg", f.iemg}, {"var", f.var}, {"wl", f.wl}};
    }, py::arg("window"));

    m.def("mape", [](const std::vector<double>& ref, const std::vector<double>& test) {
        return agreement::mape(ref, test);
    }, py::arg("reference"), py::arg("test"));
    m.def("pearson", [](const std::vector<double>& a, const std::vector<double>& b) {
        return agreement::pearson(a, b);
    }, py::arg("a"), py::arg("b"));
    m.def("bland_altman", [](const std::vector<double>& a, const std::vector<double>& b) {
        const auto ba = agreement::bland_altman(a, b);
        return std::map<std::string, double>{{"bias", ba.bias},       {"sd_diff", ba.sd_diff},
                                             {"loa_low", ba.loa_low}, {"loa_high", ba.loa_high},
                                             {"fraction_within_loa", ba.fraction_within_loa}};
    }, py::arg("a"), py::arg("b"));

    m.def("compare",
          [](const std::vector<double>& prototype, double prototype_rate, const std::vector<double>& reference,
             double reference_rate, double window_ms, double overlap) {
              agreement::CompareOptions o;
              o.window_ms = window_ms;
              o.overlap_fraction = overlap;
              const Recording p({{1, prototype}}, prototype_rate);
              const Recording r({{1, reference}}, reference_rate);
              return dump(report::compare_section(agreement::compare_devices(p, r, o)));
          },
          py::arg("prototype"), py::arg("prototype_rate"), py::arg("reference"), py::arg("reference_rate"),
          py::arg("window_ms") = 200.0, py::arg("overlap") = 0.5);

    m.def("encode_frame", [](std::uint16_t seq, std::uint32_t t_ms, const std::array<std::uint16_t, 8>& samples) {
        const auto b = comms::encode_frame({seq, t_ms, samples});
        return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
    }, py::arg("seq"), py::arg("t_ms"), py::arg("samples"));

    m.def("decode_frame", [](const py::bytes& data) -> py::object {
        const auto bytes = from_bytes(data);
        const auto r = comms::decode_frame(bytes);
        if (r.status != comms::DecodeStatus::Ok || !r.frame) return py::none();
        py::dict d;
        d["seq"] = r.frame->seq;
        d["t_ms"] = r.frame->t_ms;
        d["samples"] = r.frame->samples;
        return d;
    }, py::arg("data"));

    m.def("analyze_stream",
          [](const py::bytes& data, double rate_hz, double duration_s) {
              const auto bytes = from_bytes(data);
              comms::AnalyzerOptions o;
              o.nominal_rate_hz = rate_hz;
              o.duration_s = duration_s;
              comms::StreamIntegrityReport r;
              {
                  py::gil_scoped_release release;
                  r = comms::analyze_stream(bytes, o);
              }
              return dump(report::comms_section(r));
          },
          py::arg("data"), py::arg("rate_hz") = 800.0, py::arg("duration_s") = 0.0);

    m.def("emulate",
          [](std::uint64_t frames, double drop, double corrupt, std::uint64_t seed, std::uint16_t start_seq,
             double rate_hz) {
              comms::FaultPlan plan;
              plan.drop_probability = drop;
              plan.corrupt_probability = corrupt;
              plan.rng_seed = seed;
              plan.start_seq = start_seq;
              plan.rate_hz = rate_hz;
              comms::Emulation em;
              {
                  py::gil_scoped_release release;
                  em = comms::emulate(frames, comms::default_signal_source(seed), plan);
              }
              return py::make_tuple(as_bytes(em.bytes), dump(report::ledger_json(em.ledger, plan)));
          },
          py::arg("frames"), py::arg("drop") = 0.0, py::arg("corrupt") = 0.0, py::arg("seed") = 1,
          py::arg("start_seq") = 0, py::arg("rate_hz") = 800.0);

    m.def("assess_mech",
          [](const std::vector<double>& force_n, const std::vector<double>& displacement_mm, double area_mm2,
             double height_mm) {
              if (force_n.size() != displacement_mm.size()) throw Error("force and displacement lengths differ");
              ingest::ForceDisplacementLog log{{}, area_mm2, height_mm};
              for (std::size_t i = 0; i < force_n.size(); ++i) log.points.push_back({force_n[i], displacement_mm[i]});
              const auto curve = mech::build_curve(log);
              const ComplianceThresholds t;
              const mech::ElasticityOptions opts;
              return dump(report::mech_section(log, curve, mech::assess_elasticity(curve, t, opts), opts, t));
          },
          py::arg("force_n"), py::arg("displacement_mm"), py::arg("area_mm2"), py::arg("height_mm"));

    m.def("run_cli", [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
    }, py::arg("args"));
}
