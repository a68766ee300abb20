import numpy as np
import pytest
import scipy.spatial.distance

from dimmatic.evaluate import tsne as module


def two_blobs(count_per_blob=30, seed=0):
    rng = np.random.default_rng(seed)
    latents = np.concatenate(
        (rng.normal(0, 1, (count_per_blob, 10)), rng.normal(12, 1, (count_per_blob, 10)))
    )

    return latents, np.repeat([0, 1], count_per_blob)


def test_conditional_probabilities_match_perplexity():
    latents = np.random.default_rng(1).normal(size=(40, 5))
    squared = scipy.spatial.distance.squareform(scipy.spatial.distance.pdist(latents, 'sqeuclidean'))

    probabilities = module.conditional_probabilities(squared, 10)

    np.testing.assert_allclose(probabilities.sum(axis=1), 1)
    assert not np.any(np.diag(probabilities))

    for row in probabilities:
        row = row[row > 0]
        entropy = -np.sum(row * np.log(row))

        assert abs(entropy - np.log(10)) <= 1e-3


def test_joint_probabilities_sum_to_one():
    latents, labels = two_blobs()

    joint = module.joint_probabilities(latents, 10)

    assert joint.shape == (60 * 59 // 2,)
    assert joint.sum() == pytest.approx(1)


def test_kl_divergence_gradient_matches_finite_differences():
    rng = np.random.default_rng(2)
    joint = module.joint_probabilities(rng.normal(size=(12, 4)), 3)
    points = rng.normal(size=(12, 2))
    step = 1e-6

    gradient = module.kl_divergence(points, joint)[1]

    for index in np.ndindex(points.shape):
        upper, lower = points.copy(), points.copy()
        upper[index] += step
        lower[index] -= step
        numeric = (
            module.kl_divergence(upper, joint)[0] - module.kl_divergence(lower, joint)[0]
        ) / (2 * step)

        assert gradient[index] == pytest.approx(numeric, rel=1e-4, abs=1e-8)


def test_tsne_embed_separates_blobs():
    latents, labels = two_blobs()

    embedding = module.tsne_embed(latents, labels, perplexity=10, iterations=400, seed=3)

    assert embedding.points.shape == (60, 2)
    assert np.all(np.isfinite(embedding.points))
    assert embedding.final_kl < embedding.initial_kl
    assert module.class_silhouette(embedding, 0) > 0.5


def test_tsne_embed_is_deterministic_for_a_seed():
    latents, labels = two_blobs(count_per_blob=15)

    first = module.tsne_embed(latents, labels, perplexity=5, iterations=50, seed=4)
    second = module.tsne_embed(latents, labels, perplexity=5, iterations=50, seed=4)

    np.testing.assert_array_equal(first.points, second.points)


def test_tsne_embed_permutes_with_its_input():
    latents, labels = two_blobs(count_per_blob=15)
    order = np.random.default_rng(5).permutation(30)

    embedding = module.tsne_embed(latents, labels, perplexity=5, iterations=20, seed=4)
    permuted = module.tsne_embed(latents[order], labels[order], perplexity=5, iterations=20, seed=4)

    np.testing.assert_allclose(permuted.points, embedding.points[order], rtol=1e-6, atol=1e-10)
    np.testing.assert_array_equal(permuted.labels, labels[order])


def test_tsne_embed_with_too_few_points_for_perplexity_raises():
    latents, labels = two_blobs(count_per_blob=10)

    with pytest.raises(module.Tsne_error):
        module.tsne_embed(latents, labels, perplexity=7)


def test_tsne_embed_of_identical_latents_raises():
    with pytest.raises(module.Tsne_error):
        module.tsne_embed(np.ones((30, 10)), np.zeros(30), perplexity=5)


def test_tsne_embed_with_mismatched_labels_raises():
    latents, labels = two_blobs(count_per_blob=15)

    with pytest.raises(module.Tsne_error):
        module.tsne_embed(latents, labels[:-1], perplexity=5)


def test_class_silhouette_without_other_classes_raises():
    embedding = module.Latent_embedding(np.zeros((3, 2)), np.zeros(3), 0, 1.0, 0.5)

    with pytest.raises(module.Tsne_error):
        module.class_silhouette(embedding, 0)
