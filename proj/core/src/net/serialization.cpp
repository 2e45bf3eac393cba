#include "safemut/net/serialization.hpp"

#include <string>

#include "safemut/errors.hpp"

namespace safemut::net {

using nlohmann::json;

json to_json(const ad::ArchitectureSpec& arch) {
  json layers = json::array();
  for (const auto& layer : arch.layers) {
    if (const auto* d = std::get_if<ad::DenseLayer>(&layer)) {
      layers.push_back({{"type", "dense"},
                        {"in", d->in},
                        {"out", d->out},
                        {"activation", ad::to_string(d->activation)},
                        {"bias", d->bias}});
    } else if (const auto* r = std::get_if<ad::RecurrentLayer>(&layer)) {
      layers.push_back({{"type", "recurrent"},
                        {"in", r->in},
                        {"units", r->units},
                        {"activation", ad::to_string(r->activation)}});
    } else if (const auto* b = std::get_if<ad::ResidualBlock>(&layer)) {
      layers.push_back({{"type", "residual"},
                        {"width", b->width},
                        {"activation", ad::to_string(b->activation)},
                        {"skip_period", b->skip_period}});
    } else if (const auto* g = std::get_if<ad::DiagonalLayer>(&layer)) {
      layers.push_back({{"type", "diagonal"}, {"coefficients", g->coefficients}});
    }
  }
  return {{"id", arch.id},
          {"input_width", arch.input_width},
          {"output_width", arch.output_width},
          {"layers", layers}};
}

ad::ArchitectureSpec architecture_from_json(const json& j) {
  try {
    ad::ArchitectureSpec arch;
    arch.id = j.at("id").get<std::string>();
    arch.input_width = j.at("input_width").get<std::size_t>();
    arch.output_width = j.at("output_width").get<std::size_t>();
    for (const auto& l : j.at("layers")) {
      const auto type = l.at("type").get<std::string>();
      if (type == "dense") {
        arch.layers.emplace_back(ad::DenseLayer{
            l.at("in").get<std::size_t>(), l.at("out").get<std::size_t>(),
            ad::parse_activation(l.value("activation", "identity")), l.value("bias", true)});
      } else if (type == "recurrent") {
        arch.layers.emplace_back(ad::RecurrentLayer{l.at("in").get<std::size_t>(),
                                                    l.at("units").get<std::size_t>(),
                                                    ad::parse_activation(l.value("activation", "tanh"))});
      } else if (type == "residual") {
        arch.layers.emplace_back(ad::ResidualBlock{l.at("width").get<std::size_t>(),
                                                   ad::parse_activation(l.value("activation", "tanh")),
                                                   l.value("skip_period", std::size_t{4})});
      } else if (type == "diagonal") {
        arch.layers.emplace_back(
            ad::DiagonalLayer{l.at("coefficients").get<std::vector<double>>()});
      } else {
        throw ConfigError("unknown layer type '" + type + "'");
      }
    }
    ad::validate(arch);
    return arch;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("architecture block: ") + e.what());
  }
}

}  // namespace safemut::net
