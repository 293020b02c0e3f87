#pragma once

#include "minsess/syntax.hpp"

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace minsess {

// ---------------------------------------------------------------------------
// Labels and transitions
// ---------------------------------------------------------------------------

enum class LabelKind : std::uint8_t { Tau, Out, In, Sel, Bra };

// Internal steps on propagators, beta steps and the abstraction exchange
// that follows a decomposed choice are administrative.
enum class TauClass : std::uint8_t { Essential, NonEssential };

struct Label {
    LabelKind kind = LabelKind::Tau;
    // Out/In/Sel/Bra: the free subject. Tau: the output or selecting side of
    // the synchronisation; empty for beta steps.
    std::optional<Name> subject;
    std::vector<Name> extruded;     // Out
    std::vector<ValueRef> payload;  // Out, In, communicating Tau
    std::string choice;             // Sel, Bra, selecting Tau
    TauClass tau_class = TauClass::NonEssential;

    bool visible() const { return kind != LabelKind::Tau; }
    bool essential() const { return visible() || tau_class == TauClass::Essential; }
};

std::string print(const Label& l);

struct Step {
    Label label;
    ProcRef target; // struct-normalized
};

// Subjects of propagators and recursive propagators.
bool is_propagator(const Name& n);

// One-step reductions, deduplicated up to structural congruence and
// renaming of bound names. Name-passing sugar is expanded first.
std::vector<Step> reduce(const ProcRef& p);

// Candidate payload tuples for an input on a free subject with the given
// arity. An empty function disables inputs on free names.
using InputCandidates = std::function<std::vector<std::vector<ValueRef>>(const Name&, std::size_t)>;

// Early LTS: the tau steps of `reduce` plus visible actions on free subjects.
std::vector<Step> lts(const ProcRef& p, const InputCandidates& inputs = {});

// Deterministic run: at every step the reduct with the smallest canonical
// key is taken. Stops when no reduction applies or after max_steps.
std::vector<Step> run_trace(const ProcRef& p, int max_steps);

// ---------------------------------------------------------------------------
// Characteristic and trigger values
// ---------------------------------------------------------------------------

// The trigger channel used by characteristic processes.
Name trigger_channel();

// Characteristic process of a session or shared channel type on u, using
// the indexed names u_i, u_{i+1}, ... . Recursive types are closed with end.
ProcRef minimal_characteristic(const TypeRef& t, const Name& u, int i);
// Characteristic process of an arrow type on the variable x: x applied to
// the characteristic names of its parameters.
ProcRef minimal_characteristic_app(const TypeRef& arrow, const std::string& x);
// Characteristic value of a value or channel type. Session types yield
// |G(S)| fresh names, shared channels one fresh name, arrows an abstraction.
std::vector<ValueRef> minimal_characteristic_value(const TypeRef& t, std::set<Name>& avoid);
// \x~. t?(y).(y x~) with |x~| = |G(C~)| for an arrow type over C~.
ValueRef minimal_trigger(const TypeRef& arrow, const Name& trig);
// t?(y).(y x~) for a fresh trigger: receives the names and applies v.
ProcRef trigger_process(const Name& trig, const ValueRef& v);

// ---------------------------------------------------------------------------
// Bounded weak simulation
// ---------------------------------------------------------------------------

enum class SimStatus : std::uint8_t { Match, Mismatch, Inconclusive };

std::string to_string(SimStatus s);

struct TraceResult {
    SimStatus status = SimStatus::Match;
    // Distinguishing sequence: pairs of (source action, candidate action);
    // the candidate side of the final pair is empty when nothing matches.
    std::vector<std::pair<std::string, std::string>> witness;
    int depth_used = 0;
    std::size_t states = 0;
    std::string reason;
};

struct SimOptions {
    // Session and shared types of the source's free names; inputs on free
    // names are explored only for names listed here.
    std::map<Name, TypeRef> source_types;
    // Types of the candidate's free names. A visible candidate action on a
    // listed session name is only offered while its type permits it.
    std::map<Name, TypeRef> candidate_types;
    // Follow one deterministic chain of administrative steps per weak move
    // instead of every interleaving; sound when those steps are confluent.
    // The budget then counts rounds, each firing every administrative step
    // enabled at its start, instead of single steps.
    bool confluent_closure = true;
    // Upper bound on explored states per weak move.
    std::size_t max_closure_states = 20000;
};

// Bounded game between `p` and a candidate `q`: every essential action of
// either side must be weakly matched by the other, up to `depth` essential
// actions, with at most `tau_budget` communication steps per weak move.
// Beta steps do not count towards the budget.
TraceResult bounded_weak_sim(const ProcRef& p, const ProcRef& q, int depth, int tau_budget,
                             const SimOptions& opts = {});

// Label correspondence used by the game: subjects agree up to indexing,
// literals are equal, names line up with their indexed expansions.
bool labels_correspond(const Label& source, const Label& target);

} // namespace minsess
