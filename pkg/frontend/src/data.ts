/** Training-pair loading from the pair-extraction directory layout. */
import * as fs from 'fs';
import * as path from 'path';
import * as tf from '@tensorflow/tfjs';
import { readPng, resizeTo } from './png';

export type Stage = 'near' | 'mid';

export interface PairPaths {
  input: string;
  target: string;
}

/**
 * Find pairs under a directory. Every subdirectory (recursively, the
 * root included) containing `input.png` and `<stage>.png` contributes
 * one pair; for the `mid` stage the 90-degree image is the input when
 * present (`near.png`), the narrow one otherwise.
 */
export function findPairs(dir: string, stage: Stage): PairPaths[] {
  const pairs: PairPaths[] = [];
  const walk = (d: string) => {
    const entries = fs.readdirSync(d, { withFileTypes: true })
      .sort((a, b) => a.name.localeCompare(b.name));
    const has = (name: string) => fs.existsSync(path.join(d, name));
    const target = `${stage}.png`;
    if (has(target)) {
      const inputName = stage === 'mid' && has('near.png') ? 'near.png' : 'input.png';
      if (has(inputName)) {
        pairs.push({ input: path.join(d, inputName), target: path.join(d, target) });
      }
    }
    for (const e of entries) {
      if (e.isDirectory()) walk(path.join(d, e.name));
    }
  };
  walk(dir);
  if (pairs.length === 0) {
    throw new Error(`no ${stage} training pairs found under ${dir}`);
  }
  return pairs;
}

export interface Dataset {
  /** (n, s, s, 3) input batch. */
  inputs: tf.Tensor4D;
  /** (n, s, s, 3) target batch. */
  targets: tf.Tensor4D;
  count: number;
}

/** Read all pairs, checking sizes match, and resize to the model size. */
export function loadPairs(paths: PairPaths[], imageSize: number): Dataset {
  const inputs: tf.Tensor3D[] = [];
  const targets: tf.Tensor3D[] = [];
  for (const pair of paths) {
    const inp = readPng(pair.input);
    const tgt = readPng(pair.target);
    if (inp.shape[0] !== tgt.shape[0] || inp.shape[1] !== tgt.shape[1]) {
      throw new Error(
        `pair size mismatch: ${pair.input} is ${inp.shape[1]}x${inp.shape[0]} ` +
        `but ${pair.target} is ${tgt.shape[1]}x${tgt.shape[0]}`);
    }
    inputs.push(resizeTo(inp, imageSize));
    targets.push(resizeTo(tgt, imageSize));
  }
  return {
    inputs: tf.stack(inputs) as tf.Tensor4D,
    targets: tf.stack(targets) as tf.Tensor4D,
    count: paths.length,
  };
}

/** Deterministic cyclic batch: rows [step*b, step*b + b) modulo n. */
export function batchAt(data: Dataset, step: number,
                        batchSize: number): { x: tf.Tensor4D; y: tf.Tensor4D } {
  const idx: number[] = [];
  for (let i = 0; i < batchSize; i++) {
    idx.push((step * batchSize + i) % data.count);
  }
  const indices = tf.tensor1d(idx, 'int32');
  const x = tf.gather(data.inputs, indices) as tf.Tensor4D;
  const y = tf.gather(data.targets, indices) as tf.Tensor4D;
  indices.dispose();
  return { x, y };
}
