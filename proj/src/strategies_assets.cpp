#include <fstream>

#include "judgebench/errors.hpp"
#include "judgebench/generator.hpp"
#include "judgebench/oracle.hpp"
#include "judgebench/serialization.hpp"
#include "judgebench/strategies.hpp"
#include "personas_data.hpp"

namespace judgebench {

namespace {

std::vector<Persona> personas_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ConfigError("persona file must hold a JSON array");
  std::vector<Persona> out;
  for (const auto& p : j) {
    if (!p.is_object() || !p.contains("name") || !p.contains("system_prompt"))
      throw ConfigError("each persona needs name and system_prompt");
    out.push_back(Persona{p["name"].get<std::string>(), p["system_prompt"].get<std::string>()});
  }
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t k = i + 1; k < out.size(); ++k)
      if (out[i].name == out[k].name) throw ConfigError("duplicate persona name " + out[i].name);
  return out;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    out.push_back(text.substr(pos, end - pos));
    pos = end + 1;
  }
  return out;
}

}  // namespace

std::vector<Persona> default_personas() { return personas_from_json(nlohmann::json::parse(detail::kPersonasJson)); }

std::vector<Persona> load_personas(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open persona file " + path.string());
  auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("persona file is not valid JSON");
  return personas_from_json(j);
}

FewShotSet FewShotSet::take(std::size_t n) const {
  if (examples.size() < n)
    throw MissingAttachment("need " + std::to_string(n) + " worked examples, have " + std::to_string(examples.size()));
  FewShotSet out;
  out.examples.assign(examples.begin(), examples.begin() + static_cast<std::ptrdiff_t>(n));
  return out;
}

nlohmann::json FewShotSet::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : examples)
    arr.push_back({{"user", judgebench::to_json(e.user)},
                   {"system", judgebench::to_json(e.system)},
                   {"reasoning", e.reasoning},
                   {"decision", e.decision}});
  return arr;
}

FewShotSet FewShotSet::from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ConfigError("few-shot file must hold a JSON array");
  FewShotSet out;
  try {
    for (const auto& e : j) {
      WorkedExample ex;
      ex.user = user_block_from_json(Json(e.at("user")));
      ex.system = system_block_from_json(Json(e.at("system")));
      ex.reasoning = e.at("reasoning").get<std::vector<std::string>>();
      ex.decision = e.at("decision").get<bool>();
      out.examples.push_back(std::move(ex));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("few-shot file: ") + e.what());
  } catch (const SchemaViolation& e) {
    throw ConfigError(std::string("few-shot file: ") + e.what());
  }
  return out;
}

FewShotSet FewShotSet::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open few-shot file " + path.string());
  auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("few-shot file is not valid JSON");
  return from_json(j);
}

FewShotSet default_few_shots(const TravelTimeEstimator& travel) {
  // A seed of its own keeps the examples apart from any benchmark dataset.
  auto config = GeneratorConfig::defaults();
  config.seed = 77001;
  config.n_user_blocks = 5;
  const auto backend = UtteranceBackend::template_backend();
  const auto users = generate_user_blocks(config, backend);

  const std::optional<ErrorCategory> plan[] = {std::nullopt, ErrorCategory::Time, ErrorCategory::Location,
                                               ErrorCategory::Rating, ErrorCategory::Cost};
  FewShotSet out;
  for (std::size_t i = 0; i < users.size(); ++i) {
    const auto& user = users[i];
    auto system = generate_positive_case(config, user, backend, travel, i);
    if (plan[i]) system = generate_error_case(config, user, system, *plan[i], backend, travel, i);
    WorkedExample ex{user, system, split_lines(explain_pair(user, system, travel)),
                     judge_pair(user, system, travel).correct};
    out.examples.push_back(std::move(ex));
  }
  return out;
}

}  // namespace judgebench
