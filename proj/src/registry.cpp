#include "mif/registry.hpp"

namespace mif {

AutomatonPtr make_algorithm(const std::string& id, const Instance& inst, const AlgorithmOptions& opt) {
  inst.validate();
  AutomatonPtr a;
  if (id == "det_bitmap") {
    a = det_bitmap_mif(inst);
  } else if (id == "store_all") {
    a = store_all_mif(inst);
  } else if (id == "constant") {
    a = constant_output(inst.n, opt.constant ? Output::of(opt.constant) : Output::abort());
  } else if (id == "oracle_list") {
    a = oracle_list_mif(inst);
  } else if (id == "seed_block") {
    a = seed_block_mif(inst, opt.seed_block);
  } else if (id == "rt") {
    a = rt_mif(rt_params(inst));
  } else if (id == "rt_custom") {
    a = rt_mif(RtParams::custom(inst.n, inst.ell, opt.rt_root_width, opt.rt_b));
  } else if (id == "uniform_output") {
    std::vector<Output> outs;
    for (std::size_t i = 1; i <= opt.states; ++i) outs.push_back(Output::of((i - 1) % inst.n + 1));
    a = make_tabular(uniform_output_model(inst.n, std::move(outs)));
  } else {
    throw PreconditionError("unknown algorithm '" + id + "'");
  }
  if (opt.corrupt > 0) a = corrupt_outputs(a, opt.corrupt);
  if (opt.copies > 1) a = majority_amplify(a, opt.copies);
  return a;
}

std::vector<std::string> algorithm_ids() {
  return {"det_bitmap", "store_all", "constant", "oracle_list", "seed_block", "rt", "rt_custom", "uniform_output"};
}

std::unique_ptr<Adversary> make_adversary(const std::string& id, const Instance& inst, const Automaton& target,
                                          const AdversaryOptions& opt) {
  if (id == "echo") return echo_adversary();
  if (id == "random") return random_adversary(inst.n);
  if (id == "mixed") return mixed_adversary(inst.n, opt.p_echo);
  if (id == "replay") return replay_adversary(opt.stream);
  if (id == "learning") return learning_adversary(target, inst, opt.learner);
  throw PreconditionError("unknown adversary '" + id + "'");
}

std::vector<std::string> adversary_ids() { return {"echo", "random", "mixed", "replay", "learning"}; }

}  // namespace mif
