"""Train the email classifier and compare it with the keyword heuristic.

Shows why the pretrained model matters: leak emails written to stay under
the keyword threshold are still separable by the trained classifier.
"""

from sentinel import forensics
from sentinel.rng import substream


def main() -> None:
    corpus = forensics.generate_synthetic_corpus(seed=4242, n_ham=800,
                                                 n_spam=200)
    model = forensics.train_classifier(corpus)
    for family, acc in sorted(model.accuracies.items()):
        marker = " (selected)" if family == model.selected_family else ""
        print(f"{family:<12} hold-out accuracy {acc:.4f}{marker}")
    print(f"style baseline: sentence length "
          f"{model.baseline.mean_sentence_length:.2f}, lexical richness "
          f"{model.baseline.lexical_richness:.3f}")

    rng = substream(7, "demo-bodies")
    samples = (
        ("benign status mail", forensics.compose_body(rng, 14.0, 3.0, 3)),
        ("sparse leak (keyword-evasive)",
         forensics.generate_leak_body(rng, dense=False)),
        ("dense leak (keyword-loud)",
         forensics.generate_leak_body(rng, dense=True)),
    )
    print(f"\n{'body':<32}{'keyword score':>14}{'model score':>13}")
    for label, body in samples:
        kw = forensics.keyword_phishing_score(body)
        prob = model.phishing_prob(body)
        print(f"{label:<32}{kw:>14.2f}{prob:>13.2f}")
    print("\nthe sparse leak stays under the 0.70 keyword threshold but the "
          "trained model still flags it; that gap is what separates the "
          "eg and eg-pt detector variants.")


if __name__ == "__main__":
    main()
