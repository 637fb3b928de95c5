#include "gnnplan/suites.hpp"

#include <stdexcept>

#include "gnnplan/benchmarks.hpp"

namespace gnnplan::bench {

namespace {

RunConfig desk_config(std::size_t k, std::size_t layers, std::string augmentation) {
  RunConfig c;
  c.training.hyper.embedding = k;
  c.training.hyper.layers = layers;
  c.training.loss.kind = LossKind::l1;
  c.training.learning_rate = 1e-3;
  c.training.batch_size = 16;
  c.training.max_epochs = 150;
  c.training.budget_seconds = 3000;
  c.training.seeds = {0, 1, 2};
  c.augmentation_preset = std::move(augmentation);
  c.augmentation = augmentation_preset(c.augmentation_preset);
  c.mode = "both";
  return c;
}

Suite gripper_suite() {
  Suite s{"gripper", "gripper", desk_config(16, 8, "goal-versions"), {}, {}, {}};
  s.config.training.seeds = {0, 1, 2, 3, 4};
  // robots with one, two and three grippers
  for (std::size_t hands = 1; hands <= 3; ++hands) {
    for (std::size_t balls = 1; balls <= 3; ++balls) {
      s.train.push_back({"gripper-" + std::to_string(balls) + "-h" + std::to_string(hands),
                         gripper_instance(balls, false, hands)});
    }
  }
  s.validation.push_back({"gripper-4-b", gripper_instance(4, true)});
  for (std::size_t balls = 4; balls <= 6; ++balls) {
    s.test.push_back({"gripper-" + std::to_string(balls), gripper_instance(balls)});
  }
  return s;
}

Suite blocks_suite() {
  Suite s{"blocks", "blocks", desk_config(16, 8, "goal-versions"), {}, {}, {}};
  for (std::uint64_t seed = 1; seed <= 4; ++seed) s.train.push_back({"blocks-3-" + std::to_string(seed), blocks_instance(3, seed)});
  for (std::uint64_t seed = 1; seed <= 6; ++seed) s.train.push_back({"blocks-4-" + std::to_string(seed), blocks_instance(4, seed)});
  s.validation.push_back({"blocks-5-100", blocks_instance(5, 100)});
  for (std::uint64_t seed = 200; seed < 210; ++seed) s.test.push_back({"blocks-5-" + std::to_string(seed), blocks_instance(5, seed)});
  return s;
}

Suite spanner_suite(bool linkplus) {
  Suite s{linkplus ? "spanner-linkplus" : "spanner", "spanner",
          desk_config(16, 2, linkplus ? "spanner-linkplus" : "goal-versions"), {}, {}, {}};
  auto id = [](std::size_t l, std::size_t sp, std::size_t n, std::uint64_t seed) {
    return "spanner-" + std::to_string(l) + "-" + std::to_string(sp) + "-" + std::to_string(n) + "-" +
           std::to_string(seed);
  };
  std::uint64_t seed = 1;
  for (std::size_t l = 3; l <= 5; ++l) {
    for (std::size_t nuts = 1; nuts <= 2; ++nuts, ++seed) s.train.push_back({id(l, 2, nuts, seed), spanner_instance(l, 2, nuts, seed)});
  }
  s.validation.push_back({id(6, 2, 2, 100), spanner_instance(6, 2, 2, 100)});
  seed = 200;
  for (std::size_t l = 6; l <= 9; ++l) {
    for (std::size_t nuts = 1; nuts <= 2; ++nuts, ++seed) s.test.push_back({id(l, 3, nuts, seed), spanner_instance(l, 3, nuts, seed)});
  }
  return s;
}

Suite delivery_suite() {
  Suite s{"delivery", "delivery", desk_config(16, 8, "goal-versions"), {}, {}, {}};
  for (std::uint64_t seed = 1; seed <= 4; ++seed) s.train.push_back({"delivery-3-1-" + std::to_string(seed), delivery_instance(3, 1, seed)});
  for (std::uint64_t seed = 1; seed <= 4; ++seed) s.train.push_back({"delivery-3-2-" + std::to_string(seed), delivery_instance(3, 2, seed)});
  s.validation.push_back({"delivery-4-2-100", delivery_instance(4, 2, 100)});
  for (std::uint64_t seed = 200; seed < 205; ++seed) s.test.push_back({"delivery-5-2-" + std::to_string(seed), delivery_instance(5, 2, seed)});
  return s;
}

Suite logistics_suite() {
  Suite s{"logistics", "logistics", desk_config(16, 8, "logistics-4comp"), {}, {}, {}};
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    s.train.push_back({"logistics-2-2-1-" + std::to_string(seed), logistics_instance(2, 2, 1, 1, seed)});
  }
  s.validation.push_back({"logistics-2-2-2-100", logistics_instance(2, 2, 2, 1, 100)});
  for (std::uint64_t seed = 200; seed < 204; ++seed) {
    s.test.push_back({"logistics-3-2-2-" + std::to_string(seed), logistics_instance(3, 2, 2, 1, seed)});
  }
  return s;
}

}  // namespace

std::vector<std::string> suite_names() {
  return {"gripper", "blocks", "spanner", "spanner-linkplus", "delivery", "logistics"};
}

Suite suite(std::string_view name) {
  if (name == "gripper") return gripper_suite();
  if (name == "blocks") return blocks_suite();
  if (name == "spanner") return spanner_suite(false);
  if (name == "spanner-linkplus") return spanner_suite(true);
  if (name == "delivery") return delivery_suite();
  if (name == "logistics") return logistics_suite();
  throw std::invalid_argument("unknown suite '" + std::string(name) + "'");
}

}  // namespace gnnplan::bench
