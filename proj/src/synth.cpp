#include "storyaudit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

#include "storyaudit/text.hpp"

namespace storyaudit::synth {

namespace {

using nlohmann::json;

struct PronounSet {
  const char* subject;     // sentence-initial
  const char* possessive;  // mid-sentence
};

PronounSet pronouns_for(GenderCategory g) {
  switch (g) {
    case GenderCategory::NonBinary: return {"They", "their"};
    case GenderCategory::Feminized: return {"She", "her"};
    default: return {"He", "his"};
  }
}

GenderCategory draw_gender(std::mt19937_64& rng, const SynthParams& p) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u = unit(rng);
  if (u < p.nonbinary_share) return GenderCategory::NonBinary;
  if (u < p.nonbinary_share + p.feminized_share) return GenderCategory::Feminized;
  return GenderCategory::Masculinized;
}

}  // namespace

void SynthParams::validate() const {
  if (name_pool.empty()) throw DataError("synth params: empty name pool");
  if (!(subordination_odds > 0.0)) throw DataError("synth params: subordination odds must be > 0");
  const double mix = nonbinary_share + feminized_share + masculinized_share;
  if (std::fabs(mix - 1.0) > 1e-9)
    throw DataError("synth params: gender mix must sum to 1");
  std::size_t tracked = 0, background = 0;
  for (const auto& n : name_pool) (n.tracked ? tracked : background)++;
  if (tracked < 2 || background < 2)
    throw DataError("synth params: need at least two tracked and two background names");
}

SynthParams params_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open params file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw DataError(path + ": invalid JSON (" + std::string(e.what()) + ")");
  }
  SynthParams p;
  p.seed = j.value("seed", std::uint64_t{1});
  p.stories_per_prompt = j.value("stories_per_prompt", std::int64_t{10});
  p.subordination_odds = j.value("subordination_odds", 1.0);
  if (j.contains("gender_mix")) {
    const auto& mix = j["gender_mix"];
    p.nonbinary_share = mix.value("nb", 0.0);
    p.feminized_share = mix.value("f", 0.5);
    p.masculinized_share = mix.value("m", 0.5);
  }
  if (j.contains("tracked_race")) {
    const auto race = race_from_string(j["tracked_race"].get<std::string>());
    if (!race) throw DataError(path + ": unknown tracked_race");
    p.tracked_race = *race;
  }
  if (j.contains("name_pool")) {
    p.name_pool.clear();
    for (const auto& item : j["name_pool"]) {
      SynthName n;
      n.name = item.at("name").get<std::string>();
      n.tracked = item.value("tracked", false);
      if (item.contains("likelihood"))
        for (auto it = item["likelihood"].begin(); it != item["likelihood"].end(); ++it) {
          const auto race = race_from_string(it.key());
          if (!race) throw DataError(path + ": unknown race in likelihood vector: " + it.key());
          n.likelihood[*race] = it.value().get<double>();
        }
      p.name_pool.push_back(std::move(n));
    }
  } else {
    p.name_pool = default_params().name_pool;
  }
  p.validate();
  return p;
}

void save_params(const SynthParams& params, const std::string& path) {
  json j;
  j["seed"] = params.seed;
  j["stories_per_prompt"] = params.stories_per_prompt;
  j["subordination_odds"] = params.subordination_odds;
  j["gender_mix"] = {{"nb", params.nonbinary_share},
                     {"f", params.feminized_share},
                     {"m", params.masculinized_share}};
  j["tracked_race"] = to_string(params.tracked_race);
  json pool = json::array();
  for (const auto& n : params.name_pool) {
    json item;
    item["name"] = n.name;
    item["tracked"] = n.tracked;
    json lk;
    for (const auto& [race, v] : n.likelihood) lk[std::string(to_string(race))] = v;
    item["likelihood"] = lk;
    pool.push_back(std::move(item));
  }
  j["name_pool"] = std::move(pool);
  std::ofstream out(path);
  if (!out) throw DataError("cannot write params file: " + path);
  out << j.dump(2) << '\n';
}

SynthParams default_params() {
  SynthParams p;
  auto one_hot = [](RaceCategory race) {
    std::map<RaceCategory, double> lk;
    for (auto r : demography::voter_races()) lk[r] = r == race ? 1.0 : 0.0;
    return lk;
  };
  const char* tracked[] = {"Zorina", "Zoralio", "Zorbeth", "Zoromir"};
  const char* background[] = {"Quenlyn", "Quembert", "Quinlora", "Quomas",
                              "Quilbert", "Quarina", "Quedric", "Quilda"};
  for (const char* name : tracked)
    p.name_pool.push_back({name, one_hot(RaceCategory::Latine), true});
  for (const char* name : background)
    p.name_pool.push_back({name, one_hot(RaceCategory::White), false});
  p.tracked_race = RaceCategory::Latine;
  return p;
}

demography::LikelihoodTable table_from_params(const SynthParams& params) {
  demography::LikelihoodTable table;
  table.provider = "voter";
  for (const auto& n : params.name_pool) {
    const auto key = demography::first_name(n.name);
    if (!key) continue;
    demography::NameEntry entry;
    for (auto race : demography::voter_races()) {
      auto it = n.likelihood.find(race);
      entry.likelihood[race] = it == n.likelihood.end() ? 0.0 : it->second;
    }
    entry.persons = 1000;  // nominal support
    table.total_persons += entry.persons;
    table.names.emplace(*key, std::move(entry));
  }
  table.total_names = static_cast<std::int64_t>(table.names.size());
  return table;
}

namespace {

struct Pools {
  std::vector<std::size_t> tracked;
  std::vector<std::size_t> background;
  std::vector<std::size_t> all;
};

Pools split_pools(const SynthParams& params) {
  Pools pools;
  for (std::size_t i = 0; i < params.name_pool.size(); ++i) {
    pools.all.push_back(i);
    (params.name_pool[i].tracked ? pools.tracked : pools.background).push_back(i);
  }
  return pools;
}

std::size_t draw_from(const std::vector<std::size_t>& pool, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  return pool[pick(rng)];
}

// Subordinate slots draw tracked names with probability rho/(1+rho),
// dominant slots with 1/(1+rho), so the tracked group's expected
// subordination ratio equals rho.
std::size_t draw_role_name(const Pools& pools, const SynthParams& params, PowerRole role,
                           std::mt19937_64& rng, std::size_t avoid) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double rho = params.subordination_odds;
  const double p_tracked = role == PowerRole::Subordinate ? rho / (1.0 + rho) : 1.0 / (1.0 + rho);
  const auto& pool = unit(rng) < p_tracked ? pools.tracked : pools.background;
  std::size_t idx = draw_from(pool, rng);
  while (idx == avoid) idx = draw_from(pool, rng);  // redraw within the subpool
  return idx;
}

std::string one_character_story(const std::string& name, GenderCategory gender) {
  const auto pron = pronouns_for(gender);
  return name + " earned top marks all term. " + pron.subject + " practiced after class and " +
         pron.possessive + " notes were flawless.";
}

std::string two_character_neutral_story(const std::string& a, GenderCategory ga,
                                        const std::string& b, GenderCategory gb) {
  const auto pa = pronouns_for(ga);
  const auto pb = pronouns_for(gb);
  return a + " planned a quiet outing. " + pa.subject + " packed snacks and brought " +
         pa.possessive + " favorite games. " + b + " arrived early. " + pb.subject +
         " smiled and carried " + pb.possessive + " camera.";
}

std::string two_character_laden_story(const std::string& dom, GenderCategory gd,
                                      const std::string& sub, GenderCategory gs) {
  const auto pd = pronouns_for(gd);
  const auto ps = pronouns_for(gs);
  return dom + " led the review session. " + pd.subject + " explained each step and " +
         pd.possessive + " patience showed. " + sub + " struggled with the basics. " +
         ps.subject + " asked for help and " + ps.possessive + " work improved.";
}

}  // namespace

std::vector<StoryInstance> generate_corpus(const SynthParams& params,
                                           const std::vector<PromptSpec>& prompts) {
  params.validate();
  const Pools pools = split_pools(params);
  std::vector<StoryInstance> out;
  out.reserve(static_cast<std::size_t>(params.stories_per_prompt) * prompts.size());

  for (const auto& prompt : prompts) {
    // Per-prompt sub-seed keeps generation reproducible independent of
    // scheduling or prompt subsetting.
    std::mt19937_64 rng(text::fnv1a64_combine(params.seed ^ 0x9e3779b97f4a7c15ull, prompt.id));
    for (std::int64_t s = 0; s < params.stories_per_prompt; ++s) {
      StoryInstance instance;
      instance.model_id = "synth";
      instance.timestamp = 0;
      instance.domain = prompt.domain;
      instance.power_condition = prompt.condition;
      instance.subject_desc = prompt.subject_desc;
      instance.object_desc = prompt.object_desc;
      instance.query = prompt.text;

      if (prompt.condition == PowerCondition::Laden) {
        const GenderCategory gd = draw_gender(rng, params);
        const GenderCategory gs = draw_gender(rng, params);
        const std::size_t dom =
            draw_role_name(pools, params, PowerRole::Dominant, rng, params.name_pool.size());
        const std::size_t sub = draw_role_name(pools, params, PowerRole::Subordinate, rng, dom);
        instance.response = two_character_laden_story(params.name_pool[dom].name, gd,
                                                      params.name_pool[sub].name, gs);
      } else if (prompt.two_character()) {
        const GenderCategory ga = draw_gender(rng, params);
        const GenderCategory gb = draw_gender(rng, params);
        const std::size_t a = draw_from(pools.all, rng);
        std::size_t b = draw_from(pools.all, rng);
        while (b == a) b = draw_from(pools.all, rng);
        instance.response =
            two_character_neutral_story(params.name_pool[a].name, ga, params.name_pool[b].name, gb);
      } else {
        const GenderCategory g = draw_gender(rng, params);
        const std::size_t a = draw_from(pools.all, rng);
        instance.response = one_character_story(params.name_pool[a].name, g);
      }
      out.push_back(std::move(instance));
    }
  }
  return out;
}

}  // namespace storyaudit::synth
