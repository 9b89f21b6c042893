#include "acdl/diff.hpp"

#include <algorithm>
#include <functional>
#include <iterator>
#include <limits>
#include <map>
#include <set>

#include "acdl/format.hpp"

namespace acdl {

std::string_view to_string(EditKind kind) {
  switch (kind) {
    case EditKind::Insert: return "insert";
    case EditKind::Delete: return "delete";
    case EditKind::ReplaceRole: return "replace-role";
    case EditKind::Move: return "move";
    case EditKind::ModifyContent: return "modify-content";
  }
  return "insert";
}

namespace {

constexpr std::size_t kExactLimit = 200;
constexpr std::size_t kNoMatch = std::numeric_limits<std::size_t>::max() / 4;

// ---- tree conversion -------------------------------------------------------

Stmt shell_of(const Stmt& stmt) {
  Stmt shell = stmt;
  shell.trailing_comment.clear();
  shell.blank_before = false;
  std::visit(
      [](auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, RoleMessage> || std::is_same_v<T, ForEach>) {
          node.body = Block{{}, {}, {}, node.body.span};
        } else if constexpr (std::is_same_v<T, If>) {
          node.branches.clear();
          node.else_body.reset();
          node.else_leading_comments.clear();
        } else if constexpr (std::is_same_v<T, Switch>) {
          node.cases.clear();
          node.default_body.reset();
          node.default_leading_comments.clear();
          node.trailing_comments.clear();
          node.open_comment.clear();
          node.close_comment.clear();
        }
      },
      shell.node);
  return shell;
}

std::vector<DiffNode> block_nodes(const Block& block);

DiffNode branch_node(DiffKind kind, const Expr* label, const Block& body) {
  DiffNode node;
  node.kind = kind;
  if (label) node.expr = *label;
  node.children = block_nodes(body);
  node.span = body.span;
  return node;
}

void append_stmt(const Stmt& stmt, std::vector<DiffNode>& out) {
  if (std::holds_alternative<Comment>(stmt.node)) return;
  if (const auto* mark = std::get_if<Mark>(&stmt.node)) {
    for (const Stmt& inner : mark->body.stmts) append_stmt(inner, out);
    return;
  }
  DiffNode node;
  node.span = stmt.span;
  node.stmt = shell_of(stmt);
  if (const auto* role = std::get_if<RoleMessage>(&stmt.node)) {
    node.kind = DiffKind::Role;
    node.children = block_nodes(role->body);
  } else if (const auto* loop = std::get_if<ForEach>(&stmt.node)) {
    node.kind = DiffKind::ForEach;
    node.children = block_nodes(loop->body);
  } else if (const auto* cond = std::get_if<If>(&stmt.node)) {
    node.kind = DiffKind::If;
    for (const IfBranch& branch : cond->branches) {
      node.children.push_back(branch_node(DiffKind::Branch, &branch.condition, branch.body));
    }
    if (cond->else_body) node.children.push_back(branch_node(DiffKind::Else, nullptr, *cond->else_body));
  } else if (const auto* sw = std::get_if<Switch>(&stmt.node)) {
    node.kind = DiffKind::Switch;
    for (const SwitchCase& c : sw->cases) node.children.push_back(branch_node(DiffKind::Case, &c.label, c.body));
    if (sw->default_body) node.children.push_back(branch_node(DiffKind::Default, nullptr, *sw->default_body));
  } else {
    node.kind = DiffKind::Leaf;
  }
  out.push_back(std::move(node));
}

std::vector<DiffNode> block_nodes(const Block& block) {
  std::vector<DiffNode> out;
  for (const Stmt& stmt : block.stmts) append_stmt(stmt, out);
  return out;
}

Block rebuild_block(const std::vector<DiffNode>& nodes, Span span = {});

Stmt rebuild_stmt(const DiffNode& node) {
  Stmt stmt = node.stmt ? *node.stmt : Stmt{};
  std::visit(
      [&](auto& data) {
        using T = std::decay_t<decltype(data)>;
        if constexpr (std::is_same_v<T, RoleMessage> || std::is_same_v<T, ForEach>) {
          data.body = rebuild_block(node.children, data.body.span);
        } else if constexpr (std::is_same_v<T, If>) {
          data.branches.clear();
          data.else_body.reset();
          for (const DiffNode& child : node.children) {
            if (child.kind == DiffKind::Branch) {
              data.branches.push_back({*child.expr, rebuild_block(child.children, child.span), {}});
            } else {
              data.else_body = rebuild_block(child.children, child.span);
            }
          }
        } else if constexpr (std::is_same_v<T, Switch>) {
          data.cases.clear();
          data.default_body.reset();
          for (const DiffNode& child : node.children) {
            if (child.kind == DiffKind::Case) {
              data.cases.push_back({*child.expr, rebuild_block(child.children, child.span), {}});
            } else {
              data.default_body = rebuild_block(child.children, child.span);
            }
          }
        }
      },
      stmt.node);
  return stmt;
}

Block rebuild_block(const std::vector<DiffNode>& nodes, Span span) {
  Block block;
  block.span = span;
  for (const DiffNode& node : nodes) block.stmts.push_back(rebuild_stmt(node));
  return block;
}

// ---- labels and costs ------------------------------------------------------

std::string label_of(const DiffNode& node) {
  switch (node.kind) {
    case DiffKind::Context: return node.header + "[" + format_params(node.params) + "]";
    case DiffKind::Role: return std::get<RoleMessage>(node.stmt->node).single_line ? "single-line" : "block";
    case DiffKind::ForEach:
    case DiffKind::Switch: return format_header(*node.stmt);
    case DiffKind::If: return "If";
    case DiffKind::Branch:
    case DiffKind::Case: return format_expr(*node.expr);
    case DiffKind::Else: return "Else";
    case DiffKind::Default: return "Default";
    case DiffKind::Leaf: return std::to_string(node.stmt->node.index()) + " " + format_header(*node.stmt);
  }
  return {};
}

Role role_of(const DiffNode& node) { return std::get<RoleMessage>(node.stmt->node).role; }

std::string describe(const DiffNode& node, std::optional<Role> enclosing) {
  std::string text;
  switch (node.kind) {
    case DiffKind::Context: text = label_of(node); break;
    case DiffKind::Branch: text = "branch " + format_expr(*node.expr); break;
    case DiffKind::Case: text = "Case " + format_expr(*node.expr); break;
    case DiffKind::Else: text = "Else"; break;
    case DiffKind::Default: text = "Default"; break;
    case DiffKind::If: text = "If"; break;
    case DiffKind::Role: {
      text = std::string(1, role_letter(role_of(node))) + ":";
      if (node.children.empty()) break;
      const std::string first = describe(node.children.front(), std::nullopt);
      if (std::get<RoleMessage>(node.stmt->node).single_line) {
        text += " " + first;
      } else {
        text += " {" + first + (node.children.size() > 1 ? " ...}" : "}");
      }
      break;
    }
    case DiffKind::ForEach:
    case DiffKind::Switch: text = format_header(*node.stmt) + " {...}"; break;
    default: text = format_header(*node.stmt); break;
  }
  if (enclosing && node.kind != DiffKind::Role) text = std::string(1, role_letter(*enclosing)) + ": " + text;
  return text;
}

bool same_tree(const DiffNode& a, const DiffNode& b) {
  if (a.kind != b.kind || a.children.size() != b.children.size() || label_of(a) != label_of(b)) return false;
  if (a.kind == DiffKind::Role && role_of(a) != role_of(b)) return false;
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    if (!same_tree(a.children[i], b.children[i])) return false;
  }
  return true;
}

// ---- alignment -------------------------------------------------------------

enum class Step { Match, Delete, Insert };

class Aligner {
 public:
  std::size_t relabel(const DiffNode& a, const DiffNode& b) const {
    if (a.kind != b.kind) return kNoMatch;
    std::size_t cost = label_of(a) != label_of(b) ? 1 : 0;
    if (a.kind == DiffKind::Role && role_of(a) != role_of(b)) ++cost;
    return cost;
  }

  std::size_t cost(const DiffNode& a, const DiffNode& b) {
    const auto key = std::make_pair(&a, &b);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    std::size_t total = relabel(a, b);
    if (total < kNoMatch) total += forest(a.children, b.children).back().back();
    memo_.emplace(key, total);
    return total;
  }

  // dp[i][j]: cost of turning the first i children of a into the first j of b.
  std::vector<std::vector<std::size_t>> forest(const std::vector<DiffNode>& a, const std::vector<DiffNode>& b) {
    std::vector<std::vector<std::size_t>> dp(a.size() + 1, std::vector<std::size_t>(b.size() + 1, 0));
    for (std::size_t i = 1; i <= a.size(); ++i) dp[i][0] = dp[i - 1][0] + tree_size(a[i - 1]);
    for (std::size_t j = 1; j <= b.size(); ++j) dp[0][j] = dp[0][j - 1] + tree_size(b[j - 1]);
    for (std::size_t i = 1; i <= a.size(); ++i) {
      for (std::size_t j = 1; j <= b.size(); ++j) {
        std::size_t best = dp[i - 1][j] + tree_size(a[i - 1]);
        best = std::min(best, dp[i][j - 1] + tree_size(b[j - 1]));
        const std::size_t match = cost(a[i - 1], b[j - 1]);
        if (match < kNoMatch) best = std::min(best, dp[i - 1][j - 1] + match);
        dp[i][j] = best;
      }
    }
    return dp;
  }

  // Alignment steps in source order. Walking back from the end, a match is
  // preferred, then a delete, so earlier positions keep their pairing.
  std::vector<Step> steps(const std::vector<DiffNode>& a, const std::vector<DiffNode>& b) {
    const auto dp = forest(a, b);
    std::vector<Step> out;
    std::size_t i = a.size();
    std::size_t j = b.size();
    while (i > 0 || j > 0) {
      if (i > 0 && j > 0) {
        const std::size_t match = cost(a[i - 1], b[j - 1]);
        if (match < kNoMatch && dp[i][j] == dp[i - 1][j - 1] + match) {
          out.push_back(Step::Match);
          --i;
          --j;
          continue;
        }
      }
      if (i > 0 && dp[i][j] == dp[i - 1][j] + tree_size(a[i - 1])) {
        out.push_back(Step::Delete);
        --i;
      } else {
        out.push_back(Step::Insert);
        --j;
      }
    }
    std::reverse(out.begin(), out.end());
    return out;
  }

 private:
  std::map<std::pair<const DiffNode*, const DiffNode*>, std::size_t> memo_;
};

// ---- script generation -----------------------------------------------------

// Tree under edit, with stable ids so that positions can be recomputed as
// earlier edits shift siblings.
struct Live {
  int id = 0;
  DiffNode data;  // children unused
  std::vector<Live> kids;
};

Live make_live(const DiffNode& node, int& next_id) {
  Live live;
  live.id = next_id++;
  live.data = node;
  live.data.children.clear();
  for (const DiffNode& child : node.children) live.kids.push_back(make_live(child, next_id));
  return live;
}

DiffNode to_node(const Live& live) {
  DiffNode node = live.data;
  for (const Live& kid : live.kids) node.children.push_back(to_node(kid));
  return node;
}

bool find_path(const Live& live, int id, NodePath& path) {
  if (live.id == id) return true;
  for (std::size_t i = 0; i < live.kids.size(); ++i) {
    path.push_back(i);
    if (find_path(live.kids[i], id, path)) return true;
    path.pop_back();
  }
  return false;
}

Live& at_path(Live& root, const NodePath& path) {
  Live* node = &root;
  for (std::size_t i : path) node = &node->kids[i];
  return *node;
}

struct Op {
  enum Kind { Relabel, Delete, Insert, Move } kind = Relabel;
  int id = 0;          // Relabel, Delete, Move: node in the live tree
  int parent = 0;      // Insert, Move
  int after = -1;      // Insert, Move: preceding sibling in the final order, -1 for first
  int new_id = 0;      // Insert: id given to the inserted root
  const DiffNode* a = nullptr;
  const DiffNode* b = nullptr;
  std::optional<Role> role_a;
  std::optional<Role> role_b;
};

class ScriptBuilder {
 public:
  ScriptBuilder(const DiffNode& a, const DiffNode& b) : a_root_(a), b_root_(b) {}

  EditScript build() {
    int next_id = 0;
    live_ = make_live(a_root_, next_id);
    next_id_ = next_id;
    if (aligner_.relabel(a_root_, b_root_) > 0) ops_.push_back({Op::Relabel, 0, 0, -1, 0, &a_root_, &b_root_, {}, {}});
    int id = 0;
    align_children(a_root_, b_root_, id, std::nullopt, std::nullopt);
    pair_moves();
    return simulate();
  }

 private:
  // `a_id` is the id of `a` in the live tree; ids follow preorder of the
  // original first tree.
  void align_children(const DiffNode& a, const DiffNode& b, int a_id, std::optional<Role> role_a,
                      std::optional<Role> role_b) {
    const auto steps = aligner_.steps(a.children, b.children);
    std::vector<int> child_ids;
    int cursor = a_id + 1;
    for (const DiffNode& child : a.children) {
      child_ids.push_back(cursor);
      cursor += static_cast<int>(tree_size(child));
    }
    std::size_t i = 0;
    std::size_t j = 0;
    int last = -1;
    for (Step step : steps) {
      if (step == Step::Match) {
        const DiffNode& ca = a.children[i];
        const DiffNode& cb = b.children[j];
        if (aligner_.relabel(ca, cb) > 0) ops_.push_back({Op::Relabel, child_ids[i], a_id, -1, 0, &ca, &cb, role_a, role_b});
        const auto inner_a = ca.kind == DiffKind::Role ? std::optional<Role>(role_of(ca)) : role_a;
        const auto inner_b = cb.kind == DiffKind::Role ? std::optional<Role>(role_of(cb)) : role_b;
        align_children(ca, cb, child_ids[i], inner_a, inner_b);
        last = child_ids[i];
        ++i;
        ++j;
      } else if (step == Step::Delete) {
        ops_.push_back({Op::Delete, child_ids[i], a_id, -1, 0, &a.children[i], nullptr, role_a, role_b});
        ++i;
      } else {
        const int id = next_id_;
        next_id_ += static_cast<int>(tree_size(b.children[j]));
        ops_.push_back({Op::Insert, 0, a_id, last, id, nullptr, &b.children[j], role_a, role_b});
        last = id;
        ++j;
      }
    }
  }

  // A deleted subtree that reappears unchanged elsewhere becomes a move when
  // that is cheaper than deleting and re-inserting it.
  void pair_moves() {
    std::map<int, int> renamed;  // inserted id -> moved node id
    for (std::size_t d = 0; d < ops_.size(); ++d) {
      if (ops_[d].kind != Op::Delete || tree_size(*ops_[d].a) * 2 <= 2) continue;
      for (Op& op : ops_) {
        if (op.kind != Op::Insert || !same_tree(*ops_[d].a, *op.b)) continue;
        op.kind = Op::Move;
        op.id = ops_[d].id;
        op.a = ops_[d].a;
        renamed[op.new_id] = op.id;
        ops_[d].kind = Op::Relabel;  // placeholder, dropped below
        ops_[d].b = nullptr;
        break;
      }
    }
    std::vector<Op> kept;
    for (Op& op : ops_) {
      if (op.kind == Op::Relabel && !op.b) continue;
      if (auto it = renamed.find(op.after); it != renamed.end()) op.after = it->second;
      kept.push_back(op);
    }
    ops_ = std::move(kept);
  }

  std::size_t position_after(const Live& parent, int after) const {
    if (after < 0) return 0;
    for (std::size_t k = 0; k < parent.kids.size(); ++k) {
      if (parent.kids[k].id == after) return k + 1;
    }
    return parent.kids.size();
  }

  NodePath path_of(int id) const {
    NodePath path;
    find_path(live_, id, path);
    return path;
  }

  EditScript simulate() {
    EditScript script;
    for (const Op& op : ops_) {
      switch (op.kind) {
        case Op::Relabel: relabel(op, script); break;
        case Op::Delete: {
          Edit edit;
          edit.kind = EditKind::Delete;
          edit.path = path_of(op.id);
          edit.old_text = describe(*op.a, op.role_a);
          edit.span_a = op.a->span;
          edit.cost = tree_size(*op.a);
          NodePath parent = edit.path;
          parent.pop_back();
          auto& kids = at_path(live_, parent).kids;
          kids.erase(kids.begin() + static_cast<std::ptrdiff_t>(edit.path.back()));
          script.edits.push_back(std::move(edit));
          break;
        }
        case Op::Insert: {
          Edit edit;
          edit.kind = EditKind::Insert;
          NodePath parent = path_of(op.parent);
          Live& host = at_path(live_, parent);
          const std::size_t index = position_after(host, op.after);
          edit.path = parent;
          edit.path.push_back(index);
          edit.new_text = describe(*op.b, op.role_b);
          edit.node = *op.b;
          edit.span_b = op.b->span;
          edit.cost = tree_size(*op.b);
          int scratch = op.new_id;
          host.kids.insert(host.kids.begin() + static_cast<std::ptrdiff_t>(index), make_live(*op.b, scratch));
          script.edits.push_back(std::move(edit));
          break;
        }
        case Op::Move: {
          Edit edit;
          edit.kind = EditKind::Move;
          edit.path = path_of(op.id);
          NodePath from_parent = edit.path;
          from_parent.pop_back();
          auto& from_kids = at_path(live_, from_parent).kids;
          Live moved = std::move(from_kids[edit.path.back()]);
          from_kids.erase(from_kids.begin() + static_cast<std::ptrdiff_t>(edit.path.back()));
          NodePath parent = path_of(op.parent);
          Live& host = at_path(live_, parent);
          const std::size_t index = position_after(host, op.after);
          edit.to_path = parent;
          edit.to_path.push_back(index);
          edit.old_text = describe(*op.a, op.role_a);
          edit.new_text = describe(*op.b, op.role_b);
          edit.span_a = op.a->span;
          edit.span_b = op.b->span;
          edit.cost = 2;
          host.kids.insert(host.kids.begin() + static_cast<std::ptrdiff_t>(index), std::move(moved));
          script.edits.push_back(std::move(edit));
          break;
        }
      }
    }
    for (const Edit& edit : script.edits) script.cost += edit.cost;
    return script;
  }

  void relabel(const Op& op, EditScript& script) {
    const NodePath path = path_of(op.id);
    Live& node = at_path(live_, path);
    const DiffNode& a = *op.a;
    const DiffNode& b = *op.b;
    if (a.kind == DiffKind::Role && role_of(a) != role_of(b)) {
      Edit edit;
      edit.kind = EditKind::ReplaceRole;
      edit.path = path;
      edit.old_role = role_of(a);
      edit.new_role = role_of(b);
      edit.old_text = describe(a, op.role_a);
      edit.new_text = describe(b, op.role_b);
      edit.span_a = a.span;
      edit.span_b = b.span;
      edit.cost = 1;
      std::get<RoleMessage>(node.data.stmt->node).role = role_of(b);
      script.edits.push_back(std::move(edit));
    }
    if (label_of(a) != label_of(b)) {
      Edit edit;
      edit.kind = EditKind::ModifyContent;
      edit.path = path;
      edit.old_text = describe(a, op.role_a);
      edit.new_text = describe(b, op.role_b);
      DiffNode replacement = b;
      replacement.children.clear();
      edit.node = replacement;
      edit.span_a = a.span;
      edit.span_b = b.span;
      edit.cost = 1;
      node.data = std::move(replacement);
      script.edits.push_back(std::move(edit));
    }
  }

  const DiffNode& a_root_;
  const DiffNode& b_root_;
  Aligner aligner_;
  std::vector<Op> ops_;
  Live live_;
  int next_id_ = 0;
};

// ---- presentation-only changes ---------------------------------------------

std::multiset<std::string> mark_summaries(const ContextDef& context) {
  std::multiset<std::string> out;
  for_each_stmt(context.body, [&](const Stmt& stmt) {
    if (const auto* mark = std::get_if<Mark>(&stmt.node)) {
      std::string first = mark->body.stmts.empty() ? "empty" : format_header(mark->body.stmts.front());
      out.insert("Mark " + std::to_string(mark->number) + " around " + first);
    }
  });
  return out;
}

std::multiset<std::string> comment_texts(const ContextDef& context) {
  std::multiset<std::string> out;
  auto add = [&](const std::string& text) {
    if (!text.empty()) out.insert("//" + text);
  };
  std::function<void(const Block&)> block = [&](const Block& b) {
    add(b.open_comment);
    add(b.close_comment);
  };
  block(context.body);
  for_each_stmt(context.body, [&](const Stmt& stmt) {
    add(stmt.trailing_comment);
    std::visit(
        [&](const auto& node) {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, Comment>) {
            add(node.text);
          } else if constexpr (std::is_same_v<T, RoleMessage> || std::is_same_v<T, ForEach> ||
                               std::is_same_v<T, Mark>) {
            block(node.body);
          } else if constexpr (std::is_same_v<T, If>) {
            for (const IfBranch& branch : node.branches) {
              block(branch.body);
              for (const std::string& c : branch.leading_comments) add(c);
            }
            if (node.else_body) block(*node.else_body);
            for (const std::string& c : node.else_leading_comments) add(c);
          } else if constexpr (std::is_same_v<T, Switch>) {
            add(node.open_comment);
            add(node.close_comment);
            for (const SwitchCase& c : node.cases) {
              block(c.body);
              for (const std::string& text : c.leading_comments) add(text);
            }
            if (node.default_body) block(*node.default_body);
            for (const std::string& c : node.default_leading_comments) add(c);
            for (const std::string& c : node.trailing_comments) add(c);
          }
        },
        stmt.node);
  });
  return out;
}

void note_changes(const std::multiset<std::string>& a, const std::multiset<std::string>& b, const std::string& kind,
                  std::vector<std::string>& notes) {
  std::vector<std::string> removed;
  std::vector<std::string> added;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(removed));
  std::set_difference(b.begin(), b.end(), a.begin(), a.end(), std::back_inserter(added));
  for (const std::string& text : removed) notes.push_back(kind + " removed: " + text);
  for (const std::string& text : added) notes.push_back(kind + " added: " + text);
}

// ---- replay ----------------------------------------------------------------

DiffNode& node_at(DiffNode& root, const NodePath& path) {
  DiffNode* node = &root;
  for (std::size_t i : path) node = &node->children.at(i);
  return *node;
}

std::string location(const std::optional<Span>& span, std::string_view source) {
  if (!span) return "?";
  const LineIndex lines(source);
  const auto begin = lines.locate(span->begin);
  const auto end = lines.locate(span->end);
  return std::to_string(begin.line) + ":" + std::to_string(begin.col) + "-" + std::to_string(end.line) + ":" +
         std::to_string(end.col);
}

}  // namespace

std::size_t tree_size(const DiffNode& node) {
  std::size_t size = 1;
  for (const DiffNode& child : node.children) size += tree_size(child);
  return size;
}

DiffNode diff_tree(const ContextDef& context) {
  DiffNode root;
  root.kind = DiffKind::Context;
  root.header = context.name;
  root.params = context.params;
  root.span = context.body.span;
  root.children = block_nodes(context.body);
  return root;
}

ContextDef from_diff_tree(const DiffNode& root) {
  ContextDef context;
  context.name = root.header;
  context.params = root.params;
  context.body = rebuild_block(root.children, root.span);
  return context;
}

DiffResult diff(const ResolvedContext& a, const ResolvedContext& b) {
  DiffResult result;
  const DiffNode tree_a = diff_tree(a.context);
  const DiffNode tree_b = diff_tree(b.context);
  if (tree_size(tree_a) > kExactLimit || tree_size(tree_b) > kExactLimit) {
    result.diagnostics.push_back(make_warning(
        "W-DIFF-APPROX",
        "contexts with more than " + std::to_string(kExactLimit) + " nodes are diffed without a minimality guarantee",
        {0, 0}));
  }
  result.script = ScriptBuilder(tree_a, tree_b).build();
  note_changes(mark_summaries(a.context), mark_summaries(b.context), "mark", result.script.notes);
  note_changes(comment_texts(a.context), comment_texts(b.context), "comment", result.script.notes);
  return result;
}

ContextDef apply_edits(const ResolvedContext& a, const EditScript& script) {
  DiffNode root = diff_tree(a.context);
  for (const Edit& edit : script.edits) {
    switch (edit.kind) {
      case EditKind::Insert: {
        NodePath parent = edit.path;
        const std::size_t index = parent.back();
        parent.pop_back();
        auto& kids = node_at(root, parent).children;
        kids.insert(kids.begin() + static_cast<std::ptrdiff_t>(std::min(index, kids.size())), *edit.node);
        break;
      }
      case EditKind::Delete: {
        NodePath parent = edit.path;
        const std::size_t index = parent.back();
        parent.pop_back();
        auto& kids = node_at(root, parent).children;
        if (index < kids.size()) kids.erase(kids.begin() + static_cast<std::ptrdiff_t>(index));
        break;
      }
      case EditKind::ReplaceRole: {
        DiffNode& node = node_at(root, edit.path);
        if (node.stmt) {
          if (auto* role = std::get_if<RoleMessage>(&node.stmt->node)) role->role = *edit.new_role;
        }
        break;
      }
      case EditKind::ModifyContent: {
        DiffNode& node = node_at(root, edit.path);
        auto children = std::move(node.children);
        node = *edit.node;
        node.children = std::move(children);
        break;
      }
      case EditKind::Move: {
        NodePath from = edit.path;
        const std::size_t index = from.back();
        from.pop_back();
        auto& from_kids = node_at(root, from).children;
        DiffNode moved = std::move(from_kids.at(index));
        from_kids.erase(from_kids.begin() + static_cast<std::ptrdiff_t>(index));
        NodePath to = edit.to_path;
        const std::size_t target = to.back();
        to.pop_back();
        auto& to_kids = node_at(root, to).children;
        to_kids.insert(to_kids.begin() + static_cast<std::ptrdiff_t>(std::min(target, to_kids.size())),
                       std::move(moved));
        break;
      }
    }
  }
  return from_diff_tree(root);
}

std::string format_diff(const EditScript& script, std::string_view source_a, std::string_view source_b) {
  std::string out;
  if (script.edits.empty()) out += "no structural differences\n";
  for (const Edit& edit : script.edits) {
    switch (edit.kind) {
      case EditKind::Delete:
        out += "- " + edit.old_text + "  (" + location(edit.span_a, source_a) + ")\n";
        break;
      case EditKind::Insert:
        out += "+ " + edit.new_text + "  (" + location(edit.span_b, source_b) + ")\n";
        break;
      case EditKind::ReplaceRole:
        out += "~ role " + std::string(1, role_letter(*edit.old_role)) + " -> " +
               std::string(1, role_letter(*edit.new_role)) + ": " + edit.old_text + "  (" +
               location(edit.span_a, source_a) + ")\n";
        break;
      case EditKind::ModifyContent:
        out += "~ " + edit.old_text + " -> " + edit.new_text + "  (" + location(edit.span_a, source_a) + ")\n";
        break;
      case EditKind::Move:
        out += "> " + edit.old_text + "  (" + location(edit.span_a, source_a) + " -> " +
               location(edit.span_b, source_b) + ")\n";
        break;
    }
  }
  for (const std::string& note : script.notes) out += "# " + note + "\n";
  return out;
}

std::string format_diff_svg(const EditScript& script, const ResolvedContext& b, const Theme& theme) {
  LayoutAnnotations annotations;
  for (const Edit& edit : script.edits) {
    switch (edit.kind) {
      case EditKind::Insert: annotations.highlights[*edit.span_b] = Highlight::Inserted; break;
      case EditKind::Delete: annotations.removed.push_back(edit.old_text); break;
      case EditKind::ReplaceRole:
      case EditKind::ModifyContent:
      case EditKind::Move: annotations.highlights[*edit.span_b] = Highlight::Changed; break;
    }
  }
  return render_svg(layout(as_document(b), theme, annotations), theme);
}

}  // namespace acdl
