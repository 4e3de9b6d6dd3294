#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "mif/analysis.hpp"
#include "mif/engine.hpp"
#include "mif/reductions.hpp"
#include "mif/registry.hpp"

namespace py = pybind11;
using namespace mif;

namespace {

// An automaton bound to the instance it was built for.
struct Algorithm {
  AutomatonPtr automaton;
  Instance inst;
};

AlgorithmOptions algorithm_options(const py::kwargs& kw) {
  AlgorithmOptions o;
  for (const auto& [key, value] : kw) {
    const auto k = key.cast<std::string>();
    if (k == "constant") o.constant = value.cast<Item>();
    else if (k == "sb_parts") o.seed_block.parts = value.cast<std::size_t>();
    else if (k == "sb_list") o.seed_block.list = value.cast<std::size_t>();
    else if (k == "sb_blocks") o.seed_block.blocks = value.cast<std::size_t>();
    else if (k == "rt_root") o.rt_root_width = value.cast<std::uint64_t>();
    else if (k == "rt_b") o.rt_b = value.cast<std::vector<std::uint64_t>>();
    else if (k == "states") o.states = value.cast<std::size_t>();
    else if (k == "copies") o.copies = value.cast<std::size_t>();
    else if (k == "corrupt") o.corrupt = value.cast<double>();
    else throw PreconditionError("unknown algorithm option: " + k);
  }
  return o;
}

py::object output_value(Output o) { return o.is_abort() ? py::none() : py::cast(o.item()); }

py::dict space_dict(const SpaceReport& s) {
  py::dict d;
  d["declared_bits"] = s.declared_bits;
  d["max_observed_bits"] = s.max_observed_bits;
  return d;
}

std::unique_ptr<Adversary> adversary_for(const Algorithm& alg, const std::string& id, double p_echo,
                                         const std::vector<Item>& stream) {
  AdversaryOptions opt;
  opt.p_echo = p_echo;
  opt.stream = stream;
  return make_adversary(id, alg.inst, *alg.automaton, opt);
}

}  // namespace

PYBIND11_MODULE(mifstream, m) {
  m.doc() = "Missing-item-finding streaming algorithms, adversaries and space bounds";

  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<BudgetExceeded>(m, "BudgetExceeded", PyExc_RuntimeError);
  py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_RuntimeError);

  py::class_<Algorithm>(m, "Algorithm")
      .def_property_readonly("name", [](const Algorithm& a) { return a.automaton->name(); })
      .def_property_readonly("mode", [](const Algorithm& a) { return to_string(a.automaton->mode()); })
      .def_property_readonly("declared_bits", [](const Algorithm& a) { return a.automaton->declared_bits(); })
      .def_property_readonly("n", [](const Algorithm& a) { return a.inst.n; })
      .def_property_readonly("ell", [](const Algorithm& a) { return a.inst.ell; })
      .def_property_readonly("delta", [](const Algorithm& a) { return a.inst.delta; })
      .def("__repr__", [](const Algorithm& a) {
        return "<Algorithm " + a.automaton->name() + " n=" + std::to_string(a.inst.n) +
               " ell=" + std::to_string(a.inst.ell) + ">";
      });

  m.def("algorithm_ids", &algorithm_ids);
  m.def("adversary_ids", &adversary_ids);

  m.def(
      "make_algorithm",
      [](const std::string& id, Item n, std::size_t ell, double delta, const py::kwargs& kw) {
        const Instance inst{n, ell, delta};
        inst.validate();
        return Algorithm{make_algorithm(id, inst, algorithm_options(kw)), inst};
      },
      py::arg("id"), py::arg("n"), py::arg("ell"), py::arg("delta") = 0.0,
      "Build an algorithm by id. Options: constant, sb_parts, sb_list, sb_blocks, rt_root, rt_b, states, copies, "
      "corrupt.");

  m.def(
      "run_game",
      [](const Algorithm& alg, const std::string& adversary, std::uint64_t seed, double p_echo,
         const std::vector<Item>& stream) {
        const auto adv = adversary_for(alg, adversary, p_echo, stream);
        const auto run = run_game(*alg.automaton, *adv, alg.inst, seed);
        py::dict d;
        d["verdict"] = to_string(run.result.verdict);
        d["failed"] = run.result.verdict.failed();
        d["step"] = run.result.verdict.step;
        d["initial_output"] =
            run.transcript.initial_output ? output_value(*run.transcript.initial_output) : py::object(py::none());
        py::list rounds;
        for (const auto& r : run.transcript.rounds) rounds.append(py::make_tuple(r.input, output_value(r.output)));
        d["rounds"] = rounds;
        d["space"] = space_dict(run.result.space);
        std::ostringstream csv;
        write_transcript(csv, run.transcript);
        d["transcript_csv"] = csv.str();
        return d;
      },
      py::arg("algorithm"), py::arg("adversary") = "echo", py::arg("seed") = 1, py::arg("p_echo") = 0.5,
      py::arg("stream") = std::vector<Item>{});

  m.def(
      "estimate_error",
      [](const Algorithm& alg, const std::string& adversary, std::size_t trials, std::uint64_t seed,
         unsigned threads, double p_echo) {
        const auto adv = adversary_for(alg, adversary, p_echo, {});
        ErrorEstimate e;
        {
          py::gil_scoped_release release;
          e = estimate_error(*alg.automaton, *adv, alg.inst, trials, seed, threads);
        }
        py::dict d;
        d["trials"] = e.trials;
        d["mistakes"] = e.mistakes;
        d["aborts"] = e.aborts;
        d["mistake_rate"] = e.mistake_rate;
        d["abort_rate"] = e.abort_rate;
        d["failure_rate"] = e.failure_rate;
        d["failure_half_width"] = e.failure_half_width;
        d["space"] = space_dict(e.space);
        return d;
      },
      py::arg("algorithm"), py::arg("adversary") = "mixed", py::arg("trials") = 1000, py::arg("seed") = 1,
      py::arg("threads") = 1, py::arg("p_echo") = 0.5);

  m.def(
      "minimax",
      [](const Algorithm& alg, std::size_t budget) {
        const auto r = minimax_worst_error(*alg.automaton, alg.inst, budget);
        py::dict d;
        d["max_mistake"] = r.max_mistake;
        d["induced_abort"] = r.induced_abort;
        d["max_abort"] = r.max_abort;
        d["max_failure"] = r.max_failure;
        d["depth"] = r.depth;
        d["nodes"] = r.nodes;
        return d;
      },
      py::arg("algorithm"), py::arg("budget") = 5'000'000);

  m.def(
      "rt_params",
      [](Item n, std::size_t ell, double delta) {
        const auto p = rt_params({n, ell, delta});
        py::dict d;
        d["d"] = p.d;
        d["alpha"] = p.alpha;
        d["u"] = p.u;
        d["b"] = p.b;
        d["w"] = p.w;
        d["leaves"] = p.leaf_count();
        d["level_bits"] = p.level_bits();
        return d;
      },
      py::arg("n"), py::arg("ell"), py::arg("delta"));

  m.def(
      "rt_lb",
      [](Item n, std::size_t ell) {
        const auto r = rt_lb(n, ell);
        py::dict d;
        d["bits"] = r.bits;
        d["witness_k"] = r.witness_k ? py::cast(*r.witness_k) : py::object(py::none());
        d["closed_form"] = r.closed_form;
        return d;
      },
      py::arg("n"), py::arg("ell"));
  m.def("rt_lb_exponent", &rt_lb_exponent, py::arg("n"), py::arg("ell"), py::arg("k"));
  m.def("oracle_lb", &oracle_lb, py::arg("n"), py::arg("ell"), py::arg("delta"));
  m.def("trivial_lb", &trivial_lb, py::arg("ell"));
  m.def("pd_lb", &pd_lb, py::arg("n"), py::arg("ell"), py::arg("delta"));
  m.def("rs_lb", &rs_lb, py::arg("n"), py::arg("ell"));
  m.def(
      "rt_ub_bits", [](Item n, std::size_t ell, double delta) { return rt_ub_bits(n, ell, delta).bits; },
      py::arg("n"), py::arg("ell"), py::arg("delta"));
  m.def(
      "avoid_lb", [](Item m_, std::size_t a, std::size_t b, double delta) { return avoid_lb({m_, a, b, delta}); },
      py::arg("m"), py::arg("a"), py::arg("b"), py::arg("delta") = 0.0);
  m.def("wilson_half_width", &wilson_half_width, py::arg("successes"), py::arg("trials"),
        py::arg("z") = 1.959963984540054);

  m.def(
      "bounds_csv",
      [](Item n, double delta, const std::vector<std::size_t>& grid) {
        std::ostringstream out;
        emit_bounds_csv(out, n, delta, grid);
        return out.str();
      },
      py::arg("n"), py::arg("delta"), py::arg("ell_grid"));
}
