#include "codeqa/synth.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "codeqa/common.hpp"
#include "codeqa/corpus.hpp"

namespace codeqa {

namespace {

struct ScalarField {
  const char* name;
  // The first type is the usual one; the rest are plausible alternatives a
  // project may pick instead.
  std::vector<const char*> types;
};

struct CollectionField {
  const char* name;     // items
  const char* single;   // item
  const char* element;  // Item
  enum Kind { Sequence, Keyed, Array } kind;
};

const std::vector<ScalarField> kScalars = {
    {"name", {"String", "Name", "CharSequence"}},
    {"title", {"String", "Title", "Text"}},
    {"label", {"String", "Label", "Text"}},
    {"path", {"String", "Path", "File", "URI"}},
    {"url", {"String", "URL", "URI"}},
    {"host", {"String", "InetAddress", "Host"}},
    {"owner", {"String", "User", "Principal", "Owner"}},
    {"prefix", {"String", "CharSequence", "Prefix"}},
    {"format", {"String", "Format", "DateFormat"}},
    {"status", {"String", "Status", "int", "State"}},
    {"message", {"String", "Message", "Text"}},
    {"description", {"String", "Description", "Text"}},
    {"size", {"int", "long", "short", "Size"}},
    {"count", {"int", "long", "Integer", "AtomicInteger"}},
    {"index", {"int", "long", "Index"}},
    {"width", {"int", "double", "float", "Length"}},
    {"height", {"int", "double", "float", "Length"}},
    {"port", {"int", "short", "Integer", "Port"}},
    {"level", {"int", "Level", "byte", "short"}},
    {"limit", {"int", "long", "Limit", "Integer"}},
    {"offset", {"int", "long", "Offset", "Point"}},
    {"capacity", {"int", "long", "Capacity"}},
    {"timeout", {"long", "int", "Duration"}},
    {"timestamp", {"long", "Date", "Instant", "Timestamp"}},
    {"id", {"long", "int", "String", "UUID", "Identifier"}},
    {"version", {"long", "int", "String", "Version"}},
    {"balance", {"double", "BigDecimal", "long", "Money"}},
    {"rate", {"double", "float", "Rate", "BigDecimal"}},
    {"weight", {"double", "float", "int", "Weight"}},
    {"price", {"double", "BigDecimal", "Money", "long"}},
    {"score", {"double", "int", "float", "Score"}},
    {"ratio", {"float", "double", "Fraction"}},
    {"scale", {"float", "double", "int", "Scale"}},
    {"angle", {"float", "double", "Angle"}},
    {"enabled", {"boolean"}},
    {"visible", {"boolean"}},
    {"active", {"boolean"}},
    {"locked", {"boolean"}},
    {"dirty", {"boolean"}},
    {"flags", {"byte", "int", "short", "BitSet"}},
    {"separator", {"char", "String", "Character"}},
    {"parent", {"Node", "Element", "Component", "Tree"}},
    {"vertex", {"Vertex", "Point", "Node", "Coordinate"}},
    {"user", {"User", "Account", "Principal", "Person"}},
    {"session", {"Session", "Context", "HttpSession"}},
    {"config", {"Config", "Properties", "Settings", "Options"}},
    {"handler", {"Handler", "Callback", "Runnable", "Consumer"}},
    {"color", {"Color", "int", "Paint", "String"}},
    {"date", {"Date", "LocalDate", "Calendar", "long"}},
    {"origin", {"Point", "Vertex", "Location", "Position"}},
    {"buffer", {"ByteBuffer", "StringBuilder", "Buffer", "CharBuffer"}},
    {"file", {"File", "Path", "String", "Resource"}},
    {"locale", {"Locale", "String", "Language"}},
    {"channel", {"Channel", "SocketChannel", "Pipe", "Stream"}},
    {"record", {"Record", "Entry", "Row", "Item"}},
    {"target", {"Target", "Node", "Element", "Object"}},
    {"source", {"Source", "Reader", "InputStream", "Origin"}},
    {"listener", {"Listener", "EventListener", "Observer", "Callback"}},
    {"mode", {"Mode", "int", "String", "State"}},
    {"priority", {"short", "int", "Priority", "byte"}},
};

const std::vector<CollectionField> kCollections = {
    {"items", "item", "Item", CollectionField::Sequence},
    {"names", "name", "String", CollectionField::Sequence},
    {"tags", "tag", "String", CollectionField::Sequence},
    {"children", "child", "Node", CollectionField::Sequence},
    {"vertices", "vertex", "Vertex", CollectionField::Sequence},
    {"users", "user", "User", CollectionField::Sequence},
    {"edges", "edge", "Edge", CollectionField::Sequence},
    {"listeners", "listener", "Listener", CollectionField::Sequence},
    {"tasks", "task", "Task", CollectionField::Sequence},
    {"entries", "entry", "Entry", CollectionField::Keyed},
    {"properties", "property", "String", CollectionField::Keyed},
    {"counters", "counter", "Integer", CollectionField::Keyed},
    {"values", "value", "int", CollectionField::Array},
    {"scores", "score", "double", CollectionField::Array},
    {"lines", "line", "String", CollectionField::Array},
    {"samples", "sample", "long", CollectionField::Array},
};

constexpr const char* kSequenceContainers[] = {"List", "Set", "Collection", "ArrayList", "Deque", "LinkedList"};
constexpr const char* kKeyedContainers[] = {"Map", "HashMap", "TreeMap", "SortedMap", "LinkedHashMap"};

constexpr const char* kClasses[] = {
    "Polygon", "Account",  "Invoice",   "Player",   "Sensor",    "Route",    "Playlist", "Ticket",
    "Document", "Widget",  "Server",    "Connection", "Graph",   "Order",    "Customer", "Inventory",
    "Shape",   "Camera",   "Parser",    "Scheduler", "Report",   "Student",  "Course",   "Library",
    "Vehicle", "Engine",   "Robot",     "Sprite",   "Board",     "Market",   "Portfolio", "Wallet",
    "Mailbox", "Terminal", "Catalog",   "Recipe",   "Warehouse", "Cluster",  "Channel",  "Gateway",
};

// Optional trailing clauses. The long tail of wording is what makes
// descriptions harder to reproduce than signatures.
constexpr const char* kClauses[] = {
    "if it has been set",           "for display purposes",          "used by the renderer",
    "as configured by the user",    "without copying",               "in a thread safe way",
    "from the underlying storage",  "for the current session",       "according to the default policy",
    "when the cache is warm",       "before serialization",          "after validation",
    "for logging",                  "so that callers can inspect it", "during initialization",
    "for the active profile",       "as seen by the scheduler",      "in its canonical form",
    "for backward compatibility",   "using the shared lock",         "for the next frame",
    "as reported by the backend",   "on behalf of the caller",       "with lazy evaluation",
    "for the audit trail",          "as stored in the database",     "in milliseconds",
    "relative to the origin",       "for the given locale",          "while holding the monitor",
    "when the listener fires",      "for internal bookkeeping",      "as a defensive measure",
    "for quick lookups",            "in insertion order",            "for the export dialog",
    "ignoring case",                "if the feature is enabled",     "for remote clients",
    "unless it was reset",          "as part of the public api",     "for unit tests",
    "by delegating to the helper",  "for the legacy importer",       "once the batch completes",
};

struct Synonyms {
  const char* verb;
  std::vector<const char*> alternatives;
};

const std::vector<Synonyms> kVerbSynonyms = {
    {"returns", {"gets", "fetches", "retrieves", "obtains", "yields"}},
    {"gets", {"returns", "fetches", "retrieves", "obtains"}},
    {"sets", {"assigns", "changes", "updates", "stores"}},
    {"checks", {"tests", "determines", "verifies", "decides"}},
    {"adds", {"appends", "inserts", "puts"}},
    {"removes", {"deletes", "drops", "discards"}},
    {"computes", {"calculates", "derives", "evaluates"}},
    {"creates", {"builds", "makes", "constructs"}},
};

// Replaces the leading verb with a synonym some of the time.
std::string vary_verb(const std::string& summary, Rng& rng) {
  const auto space = summary.find(' ');
  const std::string head = summary.substr(0, space);
  for (const auto& s : kVerbSynonyms) {
    if (head != s.verb || rng.unit() >= 0.4) continue;
    return s.alternatives[rng.below(s.alternatives.size())] + summary.substr(head.size());
  }
  return summary;
}

std::string cap(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool is_numeric(std::string_view t) {
  return t == "int" || t == "long" || t == "double" || t == "float" || t == "short";
}

std::string default_value(std::string_view t) {
  if (t == "boolean") return "false";
  if (t == "char") return "' '";
  if (t == "String") return "\"\"";
  if (is_numeric(t) || t == "byte") return "0";
  return "null";
}

struct Field {
  std::string name;
  std::string type;
};

struct Candidate {
  std::string name;
  std::string source;
  std::vector<std::string> summaries;
};

class ProjectBuilder {
 public:
  ProjectBuilder(Rng& rng, std::string cls) : rng_(rng), cls_(std::move(cls)), noun_(lower(cls_)) {}

  std::vector<Candidate> build(std::size_t want) {
    pick_fields(want);
    for (const auto& f : scalars_) scalar_methods(f);
    for (const auto& [c, type] : collections_) collection_methods(*c, type);
    class_methods();
    // Deduplicate names; overloads would not give distinct negatives.
    std::set<std::string> seen;
    std::vector<Candidate> unique;
    for (auto& c : out_) {
      if (seen.insert(c.name).second) unique.push_back(std::move(c));
    }
    return unique;
  }

 private:
  std::string modifiers(double p_static = 0.0) {
    const double u = rng_.unit();
    std::string m = u < 0.78 ? "public " : u < 0.88 ? "protected " : u < 0.94 ? "private " : "";
    if (rng_.unit() < p_static) m += "static ";
    if (rng_.unit() < 0.06) m += "final ";
    if (rng_.unit() < 0.04) m += "synchronized ";
    return m;
  }

  void add(std::string name, std::string source, std::vector<std::string> summaries) {
    out_.push_back({std::move(name), std::move(source), std::move(summaries)});
  }

  std::string pick_type(const std::vector<const char*>& types) {
    if (types.size() == 1 || rng_.unit() < 0.5) return types.front();
    return types[1 + rng_.below(types.size() - 1)];
  }

  std::string container_type(const CollectionField& f) {
    switch (f.kind) {
      case CollectionField::Sequence:
        return std::string(kSequenceContainers[rng_.below(std::size(kSequenceContainers))]) + "<" + f.element + ">";
      case CollectionField::Keyed:
        return std::string(kKeyedContainers[rng_.below(std::size(kKeyedContainers))]) + "<String, " + f.element +
               ">";
      case CollectionField::Array: return std::string(f.element) + "[]";
    }
    return f.element;
  }

  void pick_fields(std::size_t want) {
    std::vector<const ScalarField*> s;
    for (const auto& f : kScalars) s.push_back(&f);
    rng_.shuffle(s);
    std::vector<const CollectionField*> c;
    for (const auto& f : kCollections) c.push_back(&f);
    rng_.shuffle(c);
    // Roughly six candidates per field; pick enough fields for `want` methods.
    const std::size_t n_coll = 2 + rng_.below(2);
    const std::size_t n_scalar = std::max<std::size_t>(6, want / 4 + 2 + rng_.below(3));
    std::set<std::string> names;
    for (const auto* f : c) {
      if (collections_.size() == n_coll) break;
      if (names.insert(f->name).second && names.insert(f->single).second) {
        collections_.push_back({f, container_type(*f)});
      }
    }
    for (const auto* f : s) {
      if (scalars_.size() == std::min(n_scalar, s.size())) break;
      if (names.insert(f->name).second) scalars_.push_back({f->name, pick_type(f->types)});
    }
  }

  void scalar_methods(const Field& f) {
    const std::string n = f.name, t = f.type, C = cap(n), c = noun_;
    if (t == "boolean") {
      add("is" + C, modifiers() + "boolean is" + C + "() {\n    return " + n + ";\n}",
          {"checks whether the " + c + " is " + n, "returns true if this " + c + " is " + n,
           "tells whether the " + c + " is currently " + n, "reports if the " + n + " flag is set"});
      add("set" + C, modifiers() + "void set" + C + "(boolean " + n + ") {\n    this." + n + " = " + n + ";\n}",
          {"marks the " + c + " as " + n + " or not", "sets the " + n + " flag of this " + c,
           "changes whether the " + c + " is " + n});
      return;
    }
    add("get" + C, modifiers() + t + " get" + C + "() {\n    return " + n + ";\n}",
        {"returns the " + n + " of this " + c, "gets the " + n, "returns the current " + n,
         "gets the " + n + " of the " + c, "returns the " + n + " value stored in this " + c,
         "provides access to the " + n + " field"});
    add("set" + C, modifiers() + "void set" + C + "(" + t + " " + n + ") {\n    this." + n + " = " + n + ";\n}",
        {"sets the " + n, "sets the " + n + " of this " + c, "updates the " + n + " of the " + c,
         "assigns a new " + n + " to the " + c, "replaces the current " + n});
    if (is_numeric(t)) {
      if (t == "double" || t == "float") {
        add("scaled" + C,
            modifiers() + t + " scaled" + C + "(" + t + " factor) {\n    return " + n + " * factor;\n}",
            {"returns the " + n + " multiplied by the given factor", "computes a scaled copy of the " + n,
             "scales the " + n + " by a factor"});
      } else {
        add("increment" + C, modifiers() + "void increment" + C + "() {\n    " + n + "++;\n}",
            {"increments the " + n + " by one", "increases the " + n + " of the " + c + " by one",
             "bumps the " + n + " counter"});
        add("exceeds" + C,
            modifiers() + "boolean exceeds" + C + "(" + t + " threshold) {\n    return " + n +
                " > threshold;\n}",
            {"checks whether the " + n + " is above the threshold",
             "returns true when the " + n + " exceeds the given threshold"});
      }
      add("reset" + C, modifiers() + "void reset" + C + "() {\n    " + n + " = 0;\n}",
          {"resets the " + n + " to zero", "clears the " + n + " of this " + c});
    } else if (t != "char" && t != "byte") {
      add("has" + C, modifiers() + "boolean has" + C + "() {\n    return " + n + " != null;\n}",
          {"checks whether the " + n + " is set", "returns true if a " + n + " has been assigned",
           "tells whether this " + c + " has a " + n});
      if (t != "String" && rng_.unit() < 0.5) {
        add("require" + C,
            modifiers() + t + " require" + C + "() throws IllegalStateException {\n    if (" + n +
                " == null) {\n        throw new IllegalStateException(\"no " + n + "\");\n    }\n    return " + n +
                ";\n}",
            {"returns the " + n + " or fails when it is missing", "gets the " + n + " and throws if it is absent"});
      }
    }
  }

  void collection_methods(const CollectionField& f, const std::string& t) {
    const std::string n = f.name, s = f.single, S = cap(s), N = cap(n), e = f.element, c = noun_;
    add("get" + N, modifiers() + t + " get" + N + "() {\n    return " + n + ";\n}",
        {"returns the " + n + " of this " + c, "gets all " + n, "returns every " + s + " held by the " + c,
         "provides the " + n + " collection"});
    switch (f.kind) {
      case CollectionField::Sequence:
        add("add" + S, modifiers() + "void add" + S + "(" + e + " " + s + ") {\n    " + n + ".add(" + s + ");\n}",
            {"adds a " + s + " to the " + c, "appends the given " + s, "registers a new " + s + " with this " + c});
        add("remove" + S,
            modifiers() + "boolean remove" + S + "(" + e + " " + s + ") {\n    return " + n + ".remove(" + s + ");\n}",
            {"removes the given " + s + " from the " + c, "deletes a " + s + " and reports whether it was present"});
        add("contains" + S,
            modifiers() + "boolean contains" + S + "(" + e + " " + s + ") {\n    return " + n + ".contains(" + s +
                ");\n}",
            {"checks whether the " + c + " contains the " + s, "returns true if the " + s + " is present"});
        add(s + "Count", modifiers() + "int " + s + "Count() {\n    return " + n + ".size();\n}",
            {"returns the number of " + n, "counts the " + n + " in this " + c});
        add("clear" + N, modifiers() + "void clear" + N + "() {\n    " + n + ".clear();\n}",
            {"removes all " + n + " from the " + c, "empties the " + n + " collection"});
        add("add" + N,
            modifiers() + "void add" + N + "(" + e + "... more) {\n    for (" + e + " x : more) {\n        " + n +
                ".add(x);\n    }\n}",
            {"adds every given " + s + " to the " + c, "appends several " + n + " at once"});
        add("first" + S,
            modifiers() + "Optional<" + e + "> first" + S + "() {\n    return " + n + ".stream().findFirst();\n}",
            {"returns the first " + s + " if there is one", "finds the first " + s + " of the " + c});
        add(s + "Array",
            modifiers() + e + "[] " + s + "Array() {\n    return " + n + ".toArray(new " + e + "[0]);\n}",
            {"copies the " + n + " into an array", "converts the " + n + " to an array"});
        break;
      case CollectionField::Keyed:
        add("put" + S,
            modifiers() + "void put" + S + "(String key, " + e + " " + s + ") {\n    " + n + ".put(key, " + s +
                ");\n}",
            {"stores a " + s + " under the given key", "associates the key with a " + s});
        add("lookup" + S,
            modifiers() + e + " lookup" + S + "(String key) {\n    return " + n + ".get(key);\n}",
            {"looks up the " + s + " for a key", "returns the " + s + " mapped to the given key"});
        add("has" + S,
            modifiers() + "boolean has" + S + "(String key) {\n    return " + n + ".containsKey(key);\n}",
            {"checks whether a " + s + " exists for the key", "returns true if the key maps to a " + s});
        add(s + "Keys", modifiers() + "Set<String> " + s + "Keys() {\n    return " + n + ".keySet();\n}",
            {"returns the keys of all " + n, "lists the keys used for " + n});
        break;
      case CollectionField::Array:
        add(s + "At",
            modifiers() + e + " " + s + "At(int position) {\n    return " + n + "[position];\n}",
            {"returns the " + s + " at the given position", "reads one " + s + " by position"});
        add("store" + S,
            modifiers() + "void store" + S + "(int position, " + e + " " + s + ") {\n    " + n + "[position] = " +
                s + ";\n}",
            {"writes a " + s + " at the given position", "stores the " + s + " in the " + n + " array"});
        add(s + "Length", modifiers() + "int " + s + "Length() {\n    return " + n + ".length;\n}",
            {"returns how many " + n + " there are", "gets the length of the " + n + " array"});
        add("copy" + N,
            modifiers() + t + " copy" + N + "() {\n    return Arrays.copyOf(" + n + ", " + n + ".length);\n}",
            {"returns a copy of the " + n, "makes a defensive copy of the " + n + " array"});
        break;
    }
  }

  void class_methods() {
    const std::string c = noun_;
    const Field* a = &scalars_[0];
    const Field* b = &scalars_[1];
    std::string ctor = modifiers() + cls_ + "(" + a->type + " " + a->name;
    std::string body = "    this." + std::string(a->name) + " = " + a->name + ";\n";
    if (rng_.unit() < 0.6) {
      ctor += std::string(", ") + b->type + " " + b->name;
      body += "    this." + std::string(b->name) + " = " + b->name + ";\n";
    }
    add(cls_, ctor + ") {\n" + body + "}",
        {"creates a new " + c + " with the given " + a->name, "constructs a " + c + " from its " + a->name,
         "initializes the " + c});
    add("toString",
        "@Override\npublic String toString() {\n    return \"" + cls_ + "[\" + " + a->name + " + \"]\";\n}",
        {"returns a string representation of the " + c, "describes this " + c + " as text",
         "formats the " + c + " for debugging"});
    add("hashCode",
        "@Override\npublic int hashCode() {\n    return Objects.hash(" + std::string(a->name) + ", " + b->name +
            ");\n}",
        {"computes a hash code for the " + c, "returns a hash based on the " + std::string(a->name) + " and " +
                                                  b->name});
    add("equals",
        "@Override\npublic boolean equals(Object other) {\n    if (!(other instanceof " + cls_ +
            ")) {\n        return false;\n    }\n    return Objects.equals(" + a->name + ", ((" + cls_ + ") other)." +
            a->name + ");\n}",
        {"compares this " + c + " with another object", "checks whether two " + c + " objects are equal"});
    add("load",
        modifiers() + "void load(String path) throws IOException {\n    byte[] raw = Files.readAllBytes(Paths.get(path));\n    parse(new String(raw));\n}",
        {"loads the " + c + " from the given path", "reads the " + c + " state from a file"});
    add("save",
        modifiers() + "void save(File file) throws IOException {\n    Files.write(file.toPath(), toString().getBytes());\n}",
        {"saves the " + c + " to a file", "writes the " + c + " state to disk"});
    add("copyOf",
        "public static <T> List<T> copyOf(List<T> source) {\n    return new ArrayList<>(source);\n}",
        {"copies the given list into a new list", "returns a shallow copy of a list"});
    add("validate",
        modifiers() + "void validate() throws IllegalStateException, IllegalArgumentException {\n    if (" +
            std::string(a->name) + " == " + default_value(a->type) +
            ") {\n        throw new IllegalStateException();\n    }\n}",
        {"validates the state of the " + c, "ensures the " + c + " is consistent"});
    add("merge" + cls_,
        modifiers() + cls_ + " merge" + cls_ + "(" + cls_ + " other, boolean overwrite) {\n    if (overwrite) {\n        this." +
            a->name + " = other." + a->name + ";\n    }\n    return this;\n}",
        {"merges another " + c + " into this one", "combines two " + c + " objects"});
    add("reset",
        modifiers() + "void reset() {\n    " + std::string(a->name) + " = " + default_value(a->type) + ";\n    " +
            b->name + " = " + default_value(b->type) + ";\n}",
        {"resets the " + c + " to its defaults", "restores the initial state of the " + c});
  }

  Rng& rng_;
  std::string cls_;
  std::string noun_;
  std::vector<Field> scalars_;
  std::vector<std::pair<const CollectionField*, std::string>> collections_;
  std::vector<Candidate> out_;
};

std::string pad3(std::size_t k) {
  std::string s = std::to_string(k);
  return std::string(s.size() < 3 ? 3 - s.size() : 0, '0') + s;
}

}  // namespace

std::vector<SynthMethod> synthesize_corpus(const SynthOptions& options) {
  if (options.methods == 0) return {};
  const std::size_t projects =
      options.projects ? options.projects : std::max<std::size_t>(3, (options.methods + 10) / 20);
  Rng rng = Rng::derive(options.seed, "synth");

  // Project sizes between half and one and a half times the mean, summing to
  // the requested total.
  std::vector<std::size_t> sizes(projects, options.methods / projects);
  for (std::size_t i = 0; i < options.methods % projects; ++i) ++sizes[i];
  for (std::size_t k = 0; k < projects; ++k) {
    const std::size_t j = rng.below(projects);
    const std::size_t move = rng.below(std::max<std::size_t>(1, sizes[k] / 2));
    if (j != k && sizes[k] - move >= 3) {
      sizes[k] -= move;
      sizes[j] += move;
    }
  }

  std::vector<SynthMethod> out;
  std::set<std::string> used_summaries;
  for (std::size_t p = 0; p < projects; ++p) {
    const std::string project = "proj" + pad3(p);
    const std::string cls = kClasses[rng.below(std::size(kClasses))];
    std::vector<Candidate> candidates;
    for (std::size_t grow = 0; candidates.size() < sizes[p]; grow += sizes[p]) {
      ProjectBuilder builder(rng, cls);
      candidates = builder.build(sizes[p] + grow);
      if (grow > 4 * sizes[p] + 64) break;
    }
    rng.shuffle(candidates);
    candidates.resize(std::min(candidates.size(), sizes[p]));

    for (std::size_t m = 0; m < candidates.size(); ++m) {
      const Candidate& cand = candidates[m];
      SynthMethod method;
      method.id = project + ".m" + pad3(m);
      method.project = project;
      method.source = cand.source;
      if (rng.unit() < options.summary_rate) {
        std::string summary;
        for (int attempt = 0; attempt < 24; ++attempt) {
          summary = vary_verb(cand.summaries[rng.below(cand.summaries.size())], rng);
          if (attempt > 0 || rng.unit() < 0.75) summary += std::string(" ") + kClauses[rng.below(std::size(kClauses))];
          if (!used_summaries.count(summary)) break;
        }
        if (used_summaries.count(summary)) summary += " in " + project;
        used_summaries.insert(summary);
        method.summary = summary;
      }
      out.push_back(std::move(method));
    }
  }
  return out;
}

std::string format_synth_corpus(const std::vector<SynthMethod>& methods) {
  std::string out;
  for (const auto& m : methods) out += corpus_line(m.id, m.project, m.source, m.summary) + "\n";
  return out;
}

}  // namespace codeqa
