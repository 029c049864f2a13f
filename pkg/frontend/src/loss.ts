/** Conditional-GAN losses: vanilla (sigmoid cross-entropy) GAN term + L1. */
import * as tf from '@tensorflow/tfjs';

/**
 * Numerically stable sigmoid cross-entropy between logits and a constant
 * label (1 = real, 0 = fake), averaged over all elements:
 * max(x, 0) - x*z + log(1 + exp(-|x|)).
 */
export function sigmoidCrossEntropy(logits: tf.Tensor, label: number): tf.Scalar {
  return tf.tidy(() => {
    const x = logits;
    const stable = tf.add(
      tf.sub(tf.relu(x), tf.mul(x, label)),
      tf.log1p(tf.exp(tf.neg(tf.abs(x)))));
    return stable.mean() as tf.Scalar;
  });
}

/** Discriminator loss: real patches toward 1, generated patches toward 0. */
export function discriminatorLoss(realLogits: tf.Tensor,
                                  fakeLogits: tf.Tensor): tf.Scalar {
  return tf.tidy(() =>
    tf.add(sigmoidCrossEntropy(realLogits, 1),
           sigmoidCrossEntropy(fakeLogits, 0)) as tf.Scalar);
}

/** Adversarial part of the generator loss: fool D toward 1. */
export function generatorGanLoss(fakeLogits: tf.Tensor): tf.Scalar {
  return sigmoidCrossEntropy(fakeLogits, 1);
}

/** Mean absolute error between the generated image and the target. */
export function l1Loss(generated: tf.Tensor, target: tf.Tensor): tf.Scalar {
  return tf.tidy(() => tf.abs(tf.sub(generated, target)).mean() as tf.Scalar);
}

/** Full generator objective: GAN term + lambda * L1 term. */
export function generatorLoss(fakeLogits: tf.Tensor, generated: tf.Tensor,
                              target: tf.Tensor,
                              lambdaL1: number): tf.Scalar {
  return tf.tidy(() =>
    tf.add(generatorGanLoss(fakeLogits),
           tf.mul(l1Loss(generated, target), lambdaL1)) as tf.Scalar);
}
