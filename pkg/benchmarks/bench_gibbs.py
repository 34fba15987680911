"""Compare the compiled and pure-Python Gibbs kernels on the same chain.

Both kernels are bit-identical in output; this script measures the speed
difference on a synthetic workload sized like a real run. Usage:

    python benchmarks/bench_gibbs.py [--docs 2000] [--doc-len 80] [--sweeps 50]
"""

import argparse
import time

import numpy as np

from sensortopics._kernels import BACKEND, get_backend


def make_workload(n_docs, doc_len, V, K, seed):
    rng = np.random.default_rng(seed)
    tokens = rng.integers(0, V, n_docs * doc_len).astype(np.int32)
    doc_ids = np.repeat(np.arange(n_docs, dtype=np.int32), doc_len)
    return tokens, doc_ids


def run_chain(mod, tokens, doc_ids, n_docs, V, K, sweeps):
    n_dk = np.zeros((n_docs, K), np.int32)
    n_kw = np.zeros((K, V), np.int32)
    n_k = np.zeros(K, np.int32)
    z = np.zeros(len(tokens), np.int32)
    state = mod.init_assignments(tokens, doc_ids, z, n_dk, n_kw, n_k, 7)
    start = time.perf_counter()
    for _ in range(sweeps):
        state = mod.sweep_train(tokens, doc_ids, z, n_dk, n_kw, n_k, 0.5, 0.01, state)
    elapsed = time.perf_counter() - start
    return elapsed, state, n_kw


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--docs", type=int, default=2000)
    parser.add_argument("--doc-len", type=int, default=80)
    parser.add_argument("--vocab", type=int, default=3000)
    parser.add_argument("--topics", type=int, default=6)
    parser.add_argument("--sweeps", type=int, default=50)
    args = parser.parse_args()

    tokens, doc_ids = make_workload(args.docs, args.doc_len, args.vocab, args.topics, 0)
    n_tokens = len(tokens)
    print(f"workload: {args.docs} docs x {args.doc_len} tokens "
          f"({n_tokens} total), V={args.vocab}, K={args.topics}, "
          f"{args.sweeps} sweeps")
    print(f"active backend at import: {BACKEND}")

    results = {}
    for name in ("compiled", "pure"):
        try:
            mod = get_backend(name)
        except ImportError:
            print(f"{name:>8}: not available")
            continue
        elapsed, state, n_kw = run_chain(
            mod, tokens, doc_ids, args.docs, args.vocab, args.topics, args.sweeps
        )
        rate = args.sweeps * n_tokens / elapsed
        results[name] = (elapsed, state, n_kw)
        print(f"{name:>8}: {elapsed:8.3f} s  ({rate / 1e6:6.2f} M token-updates/s)")

    if len(results) == 2:
        speedup = results["pure"][0] / results["compiled"][0]
        same = (
            results["pure"][1] == results["compiled"][1]
            and (results["pure"][2] == results["compiled"][2]).all()
        )
        print(f"speedup: {speedup:.1f}x, outputs bit-identical: {same}")


if __name__ == "__main__":
    main()
