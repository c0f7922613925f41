#include "textswarm/record.hpp"

#include <nlohmann/json.hpp>

#include "textswarm/language.hpp"

namespace textswarm {

DescriptionRecord make_record(std::string text, int robot_id, int tick, int track_id,
                              SealedPersonId person) {
  DescriptionRecord r{std::move(text), {}, robot_id, tick, track_id, person};
  r.tokens = tokenize(r.text);
  return r;
}

bool same_record(const DescriptionRecord& a, const DescriptionRecord& b) {
  return a.key() == b.key() && a.text == b.text && a.tokens == b.tokens &&
         a.person.reveal() == b.person.reveal();
}

void to_json(nlohmann::json& j, const DescriptionRecord& r) {
  j = nlohmann::json{{"robot", r.robot_id}, {"track", r.track_id}, {"tick", r.tick},
                     {"text", r.text},      {"tokens", r.tokens},  {"person", r.person.reveal()}};
}

DescriptionRecord record_from_json(const nlohmann::json& j) {
  DescriptionRecord r{j.at("text").get<std::string>(),
                      {},
                      j.at("robot").get<int>(),
                      j.at("tick").get<int>(),
                      j.at("track").get<int>(),
                      SealedPersonId(j.at("person").get<int>())};
  r.tokens = j.contains("tokens") ? j.at("tokens").get<std::vector<std::string>>() : tokenize(r.text);
  return r;
}

}  // namespace textswarm
