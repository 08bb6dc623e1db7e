#pragma once

#include "weakstore/history.hpp"

namespace weakstore::fixtures {

// k1/k2 history with a derived read-committed edge t2 -> t1. Listing t1
// before t2 violates read committed; init, t2, t1, t3 does not.
inline History rc_violation() {
  History h(Value(0));
  TxnId t1 = h.begin_txn(SessionId{0});
  h.append_write(t1, "k1", 1);
  h.commit(t1);
  TxnId t2 = h.begin_txn(SessionId{1});
  h.append_write(t2, "k1", 2);
  h.append_write(t2, "k2", 2);
  h.commit(t2);
  TxnId t3 = h.begin_txn(SessionId{2});
  h.append_read(t3, "k2", 2, t2);
  h.append_read(t3, "k1", 1, t1);
  h.commit(t3);
  return h;
}

// Causal violation: the last transaction reads k1 = 1 from t1 although it
// causally depends on t2, which overwrote k1. Ids: t1 = 1, t2 = 2, t4 = 3,
// t3 = 4.
inline History causal_violation() {
  History h(Value(0));
  TxnId t1 = h.begin_txn(SessionId{0});
  h.append_write(t1, "k1", 1);
  h.commit(t1);
  TxnId t2 = h.begin_txn(SessionId{1});
  h.append_read(t2, "k1", 1, t1);
  h.append_write(t2, "k1", 2);
  h.commit(t2);
  TxnId t4 = h.begin_txn(SessionId{2});
  h.append_read(t4, "k1", 2, t2);
  h.append_write(t4, "k2", 1);
  h.commit(t4);
  TxnId t3 = h.begin_txn(SessionId{3});
  h.append_read(t3, "k1", 1, t1);
  h.append_read(t3, "k2", 1, t4);
  h.commit(t3);
  return h;
}

// Shopping cart: AddItem and DeleteItem both start from the initial cart
// {I}; a third session then sees the empty cart followed by {I, I}.
inline History cart_anomaly() {
  History h(Value(Value::List{Value("I")}));
  const Value one = Value::List{Value("I")};
  const Value two = Value::List{Value("I"), Value("I")};
  const Value none = Value::List{};
  TxnId add = h.begin_txn(SessionId{0});
  h.append_read(add, "cart", one, h.init_txn());
  h.append_write(add, "cart", two);
  h.commit(add);
  TxnId del = h.begin_txn(SessionId{1});
  h.append_read(del, "cart", one, h.init_txn());
  h.append_write(del, "cart", none);
  h.commit(del);
  TxnId get1 = h.begin_txn(SessionId{2});
  h.append_read(get1, "cart", none, del);
  h.commit(get1);
  TxnId get2 = h.begin_txn(SessionId{2});
  h.append_read(get2, "cart", two, add);
  h.commit(get2);
  return h;
}

}  // namespace weakstore::fixtures
