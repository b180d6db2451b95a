import pytrec_eval, ranx
qrels = {}
for line in open("qrels.txt"):
    q, _, d, g = line.split(); qrels.setdefault(q, {})[d] = int(g)
run = {}
for line in open("run.txt"):
    q, _, d, r, s, _ = line.split(); run.setdefault(q, {})[d] = float(s)
run10 = {q: dict(sorted(v.items(), key=lambda kv: -kv[1])[:10]) for q, v in run.items()}
ev = pytrec_eval.RelevanceEvaluator(qrels, {"recall.10,1000", "map", "ndcg_cut.10"})
res = ev.evaluate(run)
rr = pytrec_eval.RelevanceEvaluator(qrels, {"recip_rank"}).evaluate(run10)
Q = ranx.Qrels(qrels); R = ranx.Run(run)
rx = ranx.evaluate(Q, R, ["mrr@10", "recall@10", "recall@1000", "ndcg_burges@10", "map"], return_mean=False)
qs = sorted(qrels)
for i, q in enumerate(qs):
    print(q, "mrr10 %.6f/%.6f" % (rr[q]["recip_rank"], rx["mrr@10"][i]),
          "r10 %.6f/%.6f" % (res[q]["recall_10"], rx["recall@10"][i]),
          "r1000 %.6f/%.6f" % (res[q]["recall_1000"], rx["recall@1000"][i]),
          "map %.6f/%.6f" % (res[q]["map"], rx["map"][i]),
          "ndcg_exp %.6f" % rx["ndcg_burges@10"][i], "ndcg_lin(trec) %.6f" % res[q]["ndcg_cut_10"])
import statistics as st
print("means mrr10", st.mean(rr[q]["recip_rank"] for q in qs), "r10", st.mean(res[q]["recall_10"] for q in qs),
      "r1000", st.mean(res[q]["recall_1000"] for q in qs), "map", st.mean(res[q]["map"] for q in qs),
      "ndcg_exp", st.mean(rx["ndcg_burges@10"]))
